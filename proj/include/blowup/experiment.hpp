#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "blowup/analysis.hpp"
#include "blowup/driver.hpp"

namespace blowup {

// Malformed or invalid config; `line` is 0 when no single line is at fault.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& message)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                      : message),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// p outside (1, m+1).
class RegimeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class InitialKind { hat, cap, table };

struct ExperimentConfig {
    double m = 0;
    double p = 0;
    double q = 0;  // derived
    double s0 = 1.0;
    int n = 100;
    InitialKind initial = InitialKind::hat;
    double amplitude = 1.0;
    std::vector<double> table_x;
    std::vector<double> table_u;
    double t_end = 10.0;
    std::optional<double> blowup_threshold;
    double cfl_safety = 0.9;
    double existence_safety = 0.5;
    double dt_max = 0.01;
    std::optional<double> dt_floor;
    bool strict = false;
    std::filesystem::path output_dir = ".";
    std::vector<double> snapshot_times;
    int snapshot_every = 0;

    SchemeParams scheme() const;
};

// Parses `key = value` lines; '#' starts a comment. Required keys: m, p.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

NodalField initial_field(const ExperimentConfig& config);

struct ExperimentResult {
    RunTrace trace;
    std::vector<std::filesystem::path> snapshots;
};

// Runs one simulation and writes trace.csv, snapshot_<t>.csv files and
// summary.txt into config.output_dir. Throws OutputError on I/O failure
// and MonitorViolation in strict mode.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Header of the per-step trace file.
inline constexpr std::string_view kTraceHeader =
    "t,dt,sup_u,sup_v,l1_v,s_minus,s_plus,lemma23_slack,eq210_slack";

void write_trace(std::ostream& out, const RunTrace& trace);
void write_snapshot(std::ostream& out, const NodalField& field);
void write_summary(std::ostream& out, const ExperimentConfig& config, const RunTrace& trace);
// Shortest round-trip decimal form, used in snapshot file names.
std::string time_label(double t);

struct CertifyReport {
    CertifyResult search;
    // Verification run with the subsolution step cap (only with a certificate).
    std::optional<RunTrace> trace;
    bool dominated_throughout = false;
    std::size_t domination_checks = 0;
};

// Plateau search, certificate search and a verification run in which the
// subsolution is compared with the numerical solution after every step.
CertifyReport certify_experiment(const ExperimentConfig& config);
void write_certificate(std::ostream& out, const ExperimentConfig& config,
                       const CertifyReport& report);

// Oracle checks on randomized inputs; prints one line per check.
bool run_selftest(std::ostream& out, unsigned seed = 12345);

}  // namespace blowup
