#include "blowup/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "blowup/errors.hpp"

namespace blowup {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Entry {
    std::string value;
    int line;
};

double parse_double(const std::string& key, const Entry& e) {
    const std::string_view s = trim(e.value);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ConfigError(e.line, "'" + key + "' expects a number, got '" + e.value + "'");
    }
    return v;
}

int parse_int(const std::string& key, const Entry& e) {
    const std::string_view s = trim(e.value);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ConfigError(e.line, "'" + key + "' expects an integer, got '" + e.value + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const Entry& e) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw ConfigError(e.line, "'" + key + "' expects true or false, got '" + e.value + "'");
}

std::vector<double> parse_list(const std::string& key, const Entry& e) {
    std::vector<double> out;
    std::string_view rest = e.value;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string item(trim(rest.substr(0, comma)));
        out.push_back(parse_double(key, Entry{item, e.line}));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

std::string fmt17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw OutputError("cannot open " + path.string() + " for writing");
    return out;
}

void close_output(std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) throw OutputError("failed writing " + path.string());
}

}  // namespace

SchemeParams ExperimentConfig::scheme() const {
    SchemeParams s;
    s.m = m;
    s.p = p;
    s.cfl_safety = cfl_safety;
    s.existence_safety = existence_safety;
    s.dt_max = dt_max;
    s.blowup_threshold = blowup_threshold;
    s.t_end = t_end;
    s.dt_floor = dt_floor;
    s.policy = strict ? MonitorPolicy::abort : MonitorPolicy::warn;
    return s;
}

ExperimentConfig parse_config(std::string_view text) {
    std::map<std::string, Entry> entries;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        ++line_no;
        const auto nl = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(line_no, "expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError(line_no, "empty key");
        if (value.empty()) throw ConfigError(line_no, "empty value for '" + key + "'");
        if (!entries.emplace(key, Entry{value, line_no}).second) {
            throw ConfigError(line_no, "duplicate key '" + key + "'");
        }
    }

    ExperimentConfig cfg;
    auto take = [&](const char* key) -> std::optional<Entry> {
        const auto it = entries.find(key);
        if (it == entries.end()) return std::nullopt;
        Entry e = it->second;
        entries.erase(it);
        return e;
    };
    auto require = [&](const char* key) {
        auto e = take(key);
        if (!e) throw ConfigError(0, std::string("missing required key '") + key + "'");
        return *e;
    };

    const Entry m_entry = require("m");
    const Entry p_entry = require("p");
    cfg.m = parse_double("m", m_entry);
    cfg.p = parse_double("p", p_entry);
    if (!(cfg.m > 0)) throw ConfigError(m_entry.line, "'m' must be positive");
    try {
        cfg.q = derive_q(cfg.m, cfg.p);
    } catch (const std::invalid_argument& ex) {
        throw RegimeError(p_entry.line, ex.what());
    }

    if (auto e = take("s0")) {
        cfg.s0 = parse_double("s0", *e);
        if (!(cfg.s0 > 0)) throw ConfigError(e->line, "'s0' must be positive");
    }
    if (auto e = take("N")) {
        cfg.n = parse_int("N", *e);
        if (cfg.n < 1) throw ConfigError(e->line, "'N' must be at least 1");
    }
    std::optional<Entry> table_x_entry, table_u_entry;
    if (auto e = take("initial")) {
        if (e->value == "hat") {
            cfg.initial = InitialKind::hat;
        } else if (e->value == "cap") {
            cfg.initial = InitialKind::cap;
        } else if (e->value == "table") {
            cfg.initial = InitialKind::table;
        } else {
            throw ConfigError(e->line, "'initial' must be hat, cap or table");
        }
    }
    if (auto e = take("amplitude")) {
        cfg.amplitude = parse_double("amplitude", *e);
        if (!(cfg.amplitude >= 0)) throw ConfigError(e->line, "'amplitude' must be >= 0");
    }
    if ((table_x_entry = take("table_x"))) cfg.table_x = parse_list("table_x", *table_x_entry);
    if ((table_u_entry = take("table_u"))) cfg.table_u = parse_list("table_u", *table_u_entry);
    if (cfg.initial == InitialKind::table) {
        if (!table_x_entry || !table_u_entry) {
            throw ConfigError(0, "initial = table requires 'table_x' and 'table_u'");
        }
        if (cfg.table_x.size() != cfg.table_u.size() || cfg.table_x.size() < 2) {
            throw ConfigError(table_u_entry->line,
                              "'table_x' and 'table_u' need the same length (>= 2)");
        }
        for (std::size_t k = 0; k < cfg.table_x.size(); ++k) {
            if (k > 0 && !(cfg.table_x[k] > cfg.table_x[k - 1])) {
                throw ConfigError(table_x_entry->line, "'table_x' must be strictly increasing");
            }
            if (std::abs(cfg.table_x[k]) > cfg.s0) {
                throw ConfigError(table_x_entry->line, "'table_x' must lie within [-s0, s0]");
            }
            if (!(cfg.table_u[k] >= 0)) {
                throw ConfigError(table_u_entry->line, "'table_u' values must be >= 0");
            }
        }
    } else if (table_x_entry || table_u_entry) {
        throw ConfigError((table_x_entry ? table_x_entry : table_u_entry)->line,
                          "table values given but 'initial' is not table");
    }

    if (auto e = take("t_end")) cfg.t_end = parse_double("t_end", *e);
    if (auto e = take("blowup_threshold")) {
        cfg.blowup_threshold = parse_double("blowup_threshold", *e);
    }
    if (auto e = take("cfl_safety")) cfg.cfl_safety = parse_double("cfl_safety", *e);
    if (auto e = take("existence_safety")) {
        cfg.existence_safety = parse_double("existence_safety", *e);
    }
    if (auto e = take("dt_max")) cfg.dt_max = parse_double("dt_max", *e);
    if (auto e = take("dt_floor")) cfg.dt_floor = parse_double("dt_floor", *e);
    if (auto e = take("strict")) cfg.strict = parse_bool("strict", *e);
    if (auto e = take("output_dir")) cfg.output_dir = e->value;
    if (auto e = take("snapshot_times")) {
        cfg.snapshot_times = parse_list("snapshot_times", *e);
        for (double t : cfg.snapshot_times) {
            if (!(t >= 0 && t <= cfg.t_end)) {
                throw ConfigError(e->line, "snapshot time " + fmt17(t) + " outside [0, t_end]");
            }
        }
    }
    if (auto e = take("snapshot_every")) {
        cfg.snapshot_every = parse_int("snapshot_every", *e);
        if (cfg.snapshot_every < 0) throw ConfigError(e->line, "'snapshot_every' must be >= 0");
    }

    if (!entries.empty()) {
        const auto& [key, e] = *entries.begin();
        throw ConfigError(e.line, "unknown key '" + key + "'");
    }
    try {
        cfg.scheme().validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(0, ex.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw OutputError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

NodalField initial_field(const ExperimentConfig& config) {
    const MovingGrid grid = build_initial_grid(config.s0, config.n);
    std::vector<double> values(grid.node_count());
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double x = grid.node(k);
        double v = 0;
        switch (config.initial) {
            case InitialKind::hat:
                v = config.amplitude * std::max(0.0, 1 - std::abs(x) / config.s0);
                break;
            case InitialKind::cap:
                v = config.amplitude * theta(x, config.s0);
                break;
            case InitialKind::table: {
                const auto& xs = config.table_x;
                const auto& us = config.table_u;
                if (x < xs.front() || x > xs.back()) break;
                const auto it = std::upper_bound(xs.begin(), xs.end(), x);
                const std::size_t j = std::min<std::size_t>(it - xs.begin(), xs.size() - 1);
                const double w = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
                v = (1 - w) * us[j - 1] + w * us[j];
                break;
            }
        }
        values[k] = v;
    }
    return NodalField(grid, std::move(values));
}

std::string time_label(double t) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, t);
    return std::string(buf, res.ptr);
}

void write_trace(std::ostream& out, const RunTrace& trace) {
    out << kTraceHeader << '\n';
    for (const StepReport& r : trace.steps) {
        out << fmt17(r.t) << ',' << fmt17(r.dt) << ',' << fmt17(r.sup_u) << ','
            << fmt17(r.sup_v) << ',' << fmt17(r.l1_v) << ',' << fmt17(r.s_minus) << ','
            << fmt17(r.s_plus) << ',' << fmt17(r.growth_slack) << ',' << fmt17(r.global_slack)
            << '\n';
    }
}

void write_snapshot(std::ostream& out, const NodalField& field) {
    const MovingGrid& g = field.grid();
    out << "x,u\n";
    out << fmt17(-g.s_minus()) << ",0\n";
    for (std::size_t k = 0; k < field.size(); ++k) {
        out << fmt17(g.node(k)) << ',' << fmt17(field.value(k)) << '\n';
    }
    out << fmt17(g.s_plus()) << ",0\n";
}

void write_summary(std::ostream& out, const ExperimentConfig& config, const RunTrace& trace) {
    auto opt = [](const std::optional<double>& v) { return v ? fmt17(*v) : std::string("none"); };
    out << "m = " << fmt17(config.m) << '\n';
    out << "p = " << fmt17(config.p) << '\n';
    out << "q = " << fmt17(config.q) << '\n';
    out << "N = " << config.n << '\n';
    out << "cause = " << to_string(trace.cause) << '\n';
    out << "steps = " << trace.steps.size() << '\n';
    out << "final_time = " << fmt17(trace.final_time) << '\n';
    out << "u0_sup = " << fmt17(trace.u0_sup) << '\n';
    out << "T1 = " << fmt17(trace.t1) << '\n';
    out << "blowup_threshold = " << fmt17(trace.blowup_threshold) << '\n';
    out << "blowup_time = " << opt(trace.blowup_time) << '\n';
    out << "blowup_time_1e4 = " << opt(trace.threshold_times[0]) << '\n';
    out << "blowup_time_1e5 = " << opt(trace.threshold_times[1]) << '\n';
    out << "blowup_time_1e6 = " << opt(trace.threshold_times[2]) << '\n';
    out << "final_sup_u = " << fmt17(trace.final_field.sup_norm()) << '\n';
    out << "final_s_minus = " << fmt17(trace.final_field.grid().s_minus()) << '\n';
    out << "final_s_plus = " << fmt17(trace.final_field.grid().s_plus()) << '\n';
    out << "max_slope_growth_rate = " << fmt17(trace.max_slope_growth_rate) << '\n';
    out << "monitor_violations = " << trace.violations << '\n';
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) {
        throw OutputError("cannot create " + config.output_dir.string() + ": " + ec.message());
    }

    const NodalField u0 = initial_field(config);
    std::vector<fs::path> snapshots;
    auto snapshot = [&](double t, const NodalField& field) {
        const fs::path path = config.output_dir / ("snapshot_" + time_label(t) + ".csv");
        auto out = open_output(path);
        write_snapshot(out, field);
        close_output(out, path);
        snapshots.push_back(path);
    };

    RunHooks hooks;
    hooks.stop_times = config.snapshot_times;
    std::vector<double> pending = config.snapshot_times;
    std::sort(pending.begin(), pending.end());
    std::size_t step = 0;
    hooks.observer = [&](double t, const NodalField& field, const StepReport* rep) {
        bool take = false;
        while (!pending.empty() && pending.front() <= t) {
            take = take || pending.front() == t;
            pending.erase(pending.begin());
        }
        if (rep) ++step;
        if (config.snapshot_every > 0 && step % config.snapshot_every == 0) take = true;
        if (take) snapshot(t, field);
    };

    RunTrace trace = run(u0, config.scheme(), hooks);

    const fs::path trace_path = config.output_dir / "trace.csv";
    auto tout = open_output(trace_path);
    write_trace(tout, trace);
    close_output(tout, trace_path);

    const fs::path summary_path = config.output_dir / "summary.txt";
    auto sout = open_output(summary_path);
    write_summary(sout, config, trace);
    close_output(sout, summary_path);

    return {std::move(trace), std::move(snapshots)};
}

CertifyReport certify_experiment(const ExperimentConfig& config) {
    const NodalField u0 = initial_field(config);
    if (!(u0.sup_norm() > 0)) {
        throw ConfigError(0, "certify: initial data is identically zero");
    }
    CertifyReport report;
    report.search = certify(u0, config.m, config.q);
    if (!report.search.certificate) return report;

    const SubsolutionParams sp = report.search.certificate->params;
    SchemeParams scheme = config.scheme();
    // Run to T if need be, without loosening the step floor tied to t_end.
    if (!scheme.dt_floor) scheme.dt_floor = 1e-12 * scheme.t_end;
    scheme.t_end = std::max(scheme.t_end, sp.T);
    report.dominated_throughout = true;

    RunHooks hooks;
    hooks.dt_limit = [&](double t, const NodalField&) { return subsolution_dt_limit(sp, t); };
    hooks.observer = [&](double t, const NodalField& field, const StepReport*) {
        ++report.domination_checks;
        if (!(t < sp.T) || !domination_check(subsolution_field(sp, t), field)) {
            report.dominated_throughout = false;
        }
    };
    report.trace = run(u0, scheme, hooks);
    return report;
}

void write_certificate(std::ostream& out, const ExperimentConfig& config,
                       const CertifyReport& report) {
    const Plateau& pl = report.search.plateau;
    out << "q = " << fmt17(config.q) << '\n';
    out << "plateau_x0 = " << fmt17(pl.x0) << '\n';
    out << "plateau_eps = " << fmt17(pl.eps) << '\n';
    out << "plateau_rho = " << fmt17(pl.rho) << '\n';
    if (!report.search.certificate) {
        out << "certificate = none\n";
        out << "message = no certificate at this mesh\n";
        out << "delta = " << fmt17(report.search.best_delta) << '\n';
        return;
    }
    const Certificate& c = *report.search.certificate;
    out << "certificate = found\n";
    out << "lambda = " << fmt17(c.params.lambda) << '\n';
    out << "a = " << fmt17(c.params.a) << '\n';
    out << "T = " << fmt17(c.params.T) << '\n';
    out << "T_star = " << fmt17(c.t_star) << '\n';
    out << "delta = " << fmt17(c.report.delta) << '\n';
    out << "A = " << fmt17(c.report.A) << '\n';
    out << "B = " << fmt17(c.report.B) << '\n';
    out << "C = " << fmt17(c.report.C) << '\n';
    out << "phi_min = " << fmt17(c.report.phi_min) << '\n';
    if (report.trace) {
        const RunTrace& tr = *report.trace;
        out << "verification_cause = " << to_string(tr.cause) << '\n';
        out << "verification_blowup_time = "
            << (tr.blowup_time ? fmt17(*tr.blowup_time) : std::string("none")) << '\n';
        out << "dominated_throughout = " << (report.dominated_throughout ? "true" : "false")
            << '\n';
        out << "domination_checks = " << report.domination_checks << '\n';
    }
}

}  // namespace blowup
