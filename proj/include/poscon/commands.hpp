#pragma once

// Subcommand bodies behind the command-line tool. Each cmd_* returns the
// process exit code; the run_* functions are the reusable cores.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "poscon/metrics.hpp"
#include "poscon/scenario.hpp"
#include "poscon/serialize.hpp"

namespace poscon {

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_parse = 2, exit_divergence = 3 };

/// Maps an exception escaping a command to its exit code.
int exit_code_for(const Error& e);

struct CheckResult {
    ValidationReport validation;
    std::vector<std::optional<RegulatorSolution>> regulators;
    std::vector<std::string> regulator_errors;  // empty string when solved

    [[nodiscard]] bool pass() const;
};

CheckResult run_check(const Scenario& scenario);
int cmd_check(const Scenario& scenario, std::ostream& out);

struct SynthesizeOptions {
    std::optional<GainMode> mode;
    std::optional<double> gamma;
    bool gamma_bisect = false;
    double bisect_low = 0.05;
    double bisect_high = 100.0;
    double bisect_resolution = 1e-3;
};

struct SynthesisResult {
    std::optional<GainSet> gains;
    std::vector<std::optional<double>> minimal_gamma;
    std::vector<std::string> diagnostics;  // failures
    std::vector<std::string> warnings;
};

/// Pinned certificates are verified as given; the others are searched.
SynthesisResult run_synthesis(const Scenario& scenario, const SynthesizeOptions& options);
int cmd_synthesize(const Scenario& scenario, const SynthesizeOptions& options,
                   const std::filesystem::path& out_file, std::ostream& out);

struct SimulateOptions {
    std::optional<double> horizon;
    std::optional<double> step;
    std::optional<std::uint64_t> seed;
    std::optional<DisturbanceSignal> disturbance;
    double consensus_threshold = 1e-3;
};

struct SimulationResult {
    ClosedLoopSystem system;
    Trajectory trajectory;
    AuditReport report;
    double gamma = 0.0;
    double horizon = 0.0;
    double step = 0.0;
    std::uint64_t seed = 0;
    bool consensus_requested = false;
    bool bound_requested = false;  // generator bound is guaranteed only for admissible mu
    bool consensus_pass = false;

    [[nodiscard]] bool pass() const;
};

SimulationResult run_simulation(const Scenario& scenario, const GainSet& gains,
                                const SimulateOptions& options);

/// Columns: t, x<i>_<k>, y<i>, y0, e<i>, E2_<i>, D2 (1-based agent and entry
/// numbers; vector outputs get a _<k> suffix).
void write_trace_csv(const Trajectory& traj, std::ostream& out);

Json simulation_to_json(const SimulationResult& result);

int cmd_simulate(const Scenario& scenario, const std::filesystem::path& gains_file,
                 const std::filesystem::path& out_dir, const SimulateOptions& options,
                 std::ostream& out);

struct ReproduceOptions {
    bool gamma_bisect = false;
    bool state_feedback = false;
    SimulateOptions simulate;
};

/// check, reference synthesis, nominal and disturbed runs; writes gains.json,
/// nominal/ and disturbed/ traces with audits, scenario.yaml and summary.md.
int cmd_reproduce_paper(const std::filesystem::path& out_dir, const ReproduceOptions& options,
                        std::ostream& out);

}  // namespace poscon
