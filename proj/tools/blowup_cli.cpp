// Command-line front end: run, certify, sweep, selftest.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <atomic>
#include <functional>
#include <iostream>
#include <thread>

#include "blowup/errors.hpp"
#include "blowup/experiment.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kMonitorAbort = 3, kIoError = 4 };

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const blowup::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const blowup::MonitorViolation& e) {
        std::cerr << "monitor abort: " << e.what() << '\n';
        return kMonitorAbort;
    } catch (const blowup::OutputError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
}

int cmd_run(const fs::path& path) {
    const blowup::ExperimentConfig cfg = blowup::load_config(path);
    const blowup::ExperimentResult res = blowup::run_experiment(cfg);
    std::ifstream summary(cfg.output_dir / "summary.txt");
    std::cout << summary.rdbuf();
    return kOk;
}

int cmd_certify(const fs::path& path) {
    const blowup::ExperimentConfig cfg = blowup::load_config(path);
    const blowup::CertifyReport report = blowup::certify_experiment(cfg);
    blowup::write_certificate(std::cout, cfg, report);
    return kOk;
}

int cmd_sweep(const fs::path& dir, unsigned jobs) {
    std::vector<fs::path> configs;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".cfg") {
            configs.push_back(entry.path());
        }
    }
    if (ec) throw blowup::OutputError("cannot list " + dir.string() + ": " + ec.message());
    std::sort(configs.begin(), configs.end());
    if (configs.empty()) {
        std::cerr << "no *.cfg files in " << dir << '\n';
        return kConfigError;
    }

    // Each run writes into its own directory, <output_dir>/<config stem>.
    std::vector<int> codes(configs.size(), kOk);
    std::vector<std::string> lines(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < configs.size();) {
            codes[i] = guarded([&] {
                blowup::ExperimentConfig cfg = blowup::load_config(configs[i]);
                const fs::path base = cfg.output_dir.is_absolute()
                                          ? cfg.output_dir
                                          : configs[i].parent_path() / cfg.output_dir;
                cfg.output_dir = base / configs[i].stem();
                const blowup::ExperimentResult res = blowup::run_experiment(cfg);
                lines[i] = configs[i].filename().string() + ": " +
                           std::string(blowup::to_string(res.trace.cause)) +
                           " t=" + std::to_string(res.trace.final_time);
                return kOk;
            });
        }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < std::max(1u, jobs); ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    int worst = kOk;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        if (!lines[i].empty()) std::cout << lines[i] << '\n';
        worst = std::max(worst, codes[i]);
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Splitting-scheme solver for w_t - (w^m w_x)_x = w^p, 1 < p < m+1"};
    app.require_subcommand(1);

    fs::path run_cfg, certify_cfg, sweep_dir;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

    auto* run = app.add_subcommand("run", "run one simulation");
    run->add_option("config", run_cfg, "config file")->required();
    auto* cert = app.add_subcommand("certify", "search for a blow-up certificate");
    cert->add_option("config", certify_cfg, "config file")->required();
    auto* sweep = app.add_subcommand("sweep", "run every *.cfg in a directory");
    sweep->add_option("config-dir", sweep_dir, "directory of configs")->required();
    sweep->add_option("-j,--jobs", jobs, "concurrent runs");
    auto* self = app.add_subcommand("selftest", "oracle checks on randomized inputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    if (*run) return guarded([&] { return cmd_run(run_cfg); });
    if (*cert) return guarded([&] { return cmd_certify(certify_cfg); });
    if (*sweep) return guarded([&] { return cmd_sweep(sweep_dir, jobs); });
    if (*self) return blowup::run_selftest(std::cout) ? kOk : kFailure;
    return kOk;
}
