#pragma once

// Post-hoc audits of a simulated trajectory: positivity, patterned
// consensus, finite-horizon L2 gain, and the generator's exponential bound.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "poscon/sim.hpp"

namespace poscon {

struct PositivityAudit {
    bool pass = false;
    double positivity_min = 0.0;  // over agent states x_i and generator states w_i
    double observer_min = 0.0;  // informational; 0 when there is no observer
    double worst_time = 0.0;
};

/// Passes iff every x_i and w_i entry is >= -slack at every sample.
PositivityAudit audit_positivity(const Trajectory& traj, double slack);

enum class DecayStatus { fitted, insufficient_decay, skipped_disturbed };

std::string_view to_string(DecayStatus status);

struct ConsensusAudit {
    double tail_fraction = 0.2;
    double tail_start = 0.0;
    std::vector<double> tail_sup;  // per agent, sup ||e_i|| over the tail window
    std::vector<double> final_error;  // per agent, ||e_i(T)||
    DecayStatus status = DecayStatus::insufficient_decay;
    std::optional<double> decay_rate;  // slope of log ||e|| on the fit window
    std::size_t fit_samples = 0;
    double fit_low = 1e-8;
    double fit_high = 1e-2;

    /// Every tail sup at or below `threshold`.
    [[nodiscard]] bool converged(double threshold) const;
};

/// Tail sup-norms per agent, plus a least-squares fit of log ||e(t)|| (stacked
/// error) over the samples with ||e|| in [1e-8, 1e-2]. The fit is skipped for
/// disturbed trajectories.
ConsensusAudit audit_consensus(const Trajectory& traj, double tail_fraction = 0.2);

struct KappaBreakdown {
    double tracking = 0.0;  // x~(0)^T Q^-1 x~(0)
    double generator = 0.0;  // iota * V_w~(0)
    double observer = 0.0;  // m * xbar(0)^T P xbar(0)
    double iota = 0.0;
    double observer_weight = 0.0;
    double c_tracking = 0.0;  // certified decay constant of the Q block
    double c_observer = 0.0;
    [[nodiscard]] double total() const { return tracking + generator + observer; }
};

/// V_i(0) from the certificate Lyapunov data, with the weights evaluated at
/// the lower bounds needed for the dissipation inequality. Throws
/// MissingCertificate for systems without gains.
std::vector<KappaBreakdown> auto_kappa(const ClosedLoopSystem& system, double lambda_min);

struct L2Audit {
    double gamma = 0.0;
    double disturbance_energy = 0.0;
    std::vector<double> error_energy;
    std::vector<double> kappa;
    std::vector<double> slack;  // gamma^2 int ||d||^2 + kappa - int ||e_i||^2
    bool pass = false;
};

L2Audit audit_l2_gain(const Trajectory& traj, double gamma, std::span<const double> kappa);

struct GeneratorBoundAudit {
    double lambda_min = 0.0;
    double initial_spread = 0.0;  // ||w~(0)||
    double margin = 0.0;  // min_t ||w~(0)|| e^{-lambda t} - ||w~(t)||
    double worst_time = 0.0;
    bool pass = false;
};

/// Generator disagreement bound; passes iff margin >= -(1e-6 ||w~(0)|| + 1e-12).
GeneratorBoundAudit audit_generator_bound(const Trajectory& traj, double lambda_min);

/// Stacked disagreement w~ = col(w_i - w_av) at one sample.
Vec generator_disagreement(const Trajectory& traj, std::size_t sample);

struct AuditReport {
    PositivityAudit positivity;
    ConsensusAudit consensus;
    std::optional<L2Audit> l2;
    std::optional<GeneratorBoundAudit> generator_bound;
    std::vector<KappaBreakdown> kappa;
};

}  // namespace poscon
