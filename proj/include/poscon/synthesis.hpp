#pragma once

// Matrix-inequality conditions for the tracking controller, a derivative-free
// search for diagonal certificates, gain formulas and the generator coupling
// gain.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poscon/error.hpp"
#include "poscon/model.hpp"
#include "poscon/regulator.hpp"
#include "poscon/topology.hpp"

namespace poscon {

enum class ControllerKind { state_feedback, output_feedback };

/// `full` carries the gamma-dependent attenuation term; `relaxed` drops the
/// disturbance and output terms (nominal consensus only).
enum class ConditionSet { full, relaxed };

enum class GainMode { state_feedback, output_feedback, relaxed };

std::string_view to_string(ControllerKind kind);
std::string_view to_string(ConditionSet set);
std::string_view to_string(GainMode mode);

/// Entrywise "> 0" in the nonnegative-matrix sense: every entry >= -tol and at
/// least one entry > tol.
struct EntrywiseMargin {
    double min_entry = 0.0;
    double max_entry = 0.0;
    bool pass = false;
};

/// Negative definiteness of a symmetric form S: margin = -lambda_max(S),
/// pass iff margin > definiteness_margin. A positive diagonal entry is a
/// direct witness of failure and is reported alongside.
struct DefinitenessMargin {
    double margin = 0.0;
    Vec eigenvalues;  // ascending
    double max_diagonal = 0.0;
    Eigen::Index max_diagonal_index = 0;  // 0-based
    bool pass = false;
};

struct ConditionMargins {
    EntrywiseMargin entrywise;
    DefinitenessMargin definiteness;

    [[nodiscard]] bool pass() const { return entrywise.pass && definiteness.pass; }
};

/// Observer block (P) plus tracking block (Q).
struct OutputMargins {
    ConditionMargins observer;
    ConditionMargins tracking;

    [[nodiscard]] bool pass() const { return observer.pass() && tracking.pass(); }
};

/// A Q - B B^T + delta Q > 0 and
/// Q A^T + A Q - 2 B B^T + gamma^-2 D D^T + Q C^T C Q < 0.
ConditionMargins check_state_conditions(const AgentModel& agent, const Vec& q_diag, double delta,
                                        double gamma, const ToleranceConfig& tol = {});

/// A Q - B B^T + delta Q > 0 and Q A^T + A Q - 2 B B^T < 0.
ConditionMargins check_relaxed_conditions(const AgentModel& agent, const Vec& q_diag, double delta,
                                          const ToleranceConfig& tol = {});

/// P A - C^T C + delta P > 0, A^T P + P A - 2 C^T C < 0, plus the Q block
/// (full when gamma is given, relaxed otherwise).
OutputMargins check_output_conditions(const AgentModel& agent, const Vec& p_diag, const Vec& q_diag,
                                      double delta, std::optional<double> gamma,
                                      const ToleranceConfig& tol = {});

struct NamedMargin {
    std::string name;
    double value = 0.0;
    bool pass = false;
};

struct FeasibilityCertificate {
    Vec q;  // diagonal of Q
    std::optional<Vec> p;  // diagonal of P, output feedback only
    double delta = 0.0;
    std::optional<double> gamma;  // absent for relaxed conditions
    ConditionSet conditions = ConditionSet::full;
    std::vector<NamedMargin> margins;

    [[nodiscard]] bool pass() const;
};

/// Evaluates the conditions at the given point and records the margins. Does
/// not throw on failure; inspect pass().
FeasibilityCertificate certify(const AgentModel& agent, const Vec& q_diag,
                               const std::optional<Vec>& p_diag, double delta,
                               std::optional<double> gamma, const ToleranceConfig& tol = {});

/// Smallest delta making the diagonal of the entrywise inequalities
/// nonnegative at (Q, P).
double minimal_delta(const AgentModel& agent, const Vec& q_diag, const std::optional<Vec>& p_diag);

struct SearchOptions {
    ControllerKind controller = ControllerKind::state_feedback;
    ConditionSet conditions = ConditionSet::full;
    double gamma = 4.0;
    std::size_t budget = 200'000;
    double diag_min = 1e-2;
    double diag_max = 1e2;
    double delta_min = 1e-3;
    double delta_max = 10.0;
};

class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& message, std::vector<NamedMargin> best);

    [[nodiscard]] const std::vector<NamedMargin>& best_margins() const noexcept { return best_; }

private:
    std::vector<NamedMargin> best_;
};

/// Scans scalar diagonals outward from the identity over a log grid on
/// [diag_min, diag_max], then refines per coordinate on the worst margin.
/// The returned certificate is re-verified by certify(). Throws
/// InfeasibleError with the best margins seen once the budget is spent.
FeasibilityCertificate search_certificate(const AgentModel& agent, const SearchOptions& options,
                                          const ToleranceConfig& tol = {});

/// Smallest gamma in [lo, hi] (to `resolution`) for which the search finds a
/// full certificate; nullopt if even `hi` fails.
std::optional<double> bisect_gamma(const AgentModel& agent, ControllerKind controller, double lo,
                                   double hi, double resolution, const ToleranceConfig& tol = {},
                                   std::size_t budget = 200'000);

struct AgentGains {
    Mat K1;  // m x n
    Mat K2;  // m x n0
    std::optional<Mat> K3;  // n x l
    RegulatorSolution regulator;
    FeasibilityCertificate certificate;
    GainMode mode = GainMode::state_feedback;
};

/// K1 = -B^T Q^-1, K2 = U - K1 X, K3 = P^-1 C^T. Throws InvariantViolation if
/// a sign or Metzler postcondition fails.
AgentGains compute_gains(const AgentModel& agent, const FeasibilityCertificate& cert,
                         const RegulatorSolution& regulator, ControllerKind controller,
                         const ToleranceConfig& tol = {});

struct GainSet {
    ControllerKind controller = ControllerKind::state_feedback;
    double mu = 0.0;
    double lambda_min = 0.0;  // 0 for a single agent
    std::vector<AgentGains> agents;
};

/// ||A0|| / lambda_min + 1, or 1 for a single node.
double mu_lower_bound(const PatternModel& pattern, std::span<const Graph> graphs,
                      const ToleranceConfig& tol = {});

/// mu_lower_bound + margin. Throws DisconnectedGraph when lambda_min <= zero_tol.
double select_mu(const PatternModel& pattern, std::span<const Graph> graphs, double margin,
                 const ToleranceConfig& tol = {});

bool validate_mu(double mu, const PatternModel& pattern, std::span<const Graph> graphs,
                 const ToleranceConfig& tol = {});

struct PinnedDiagonals {
    Vec q;
    std::optional<Vec> p;
};

/// Recovers diagonal Q (and P) from published gains of the form K1 = -B^T Q^-1
/// and K3 = P^-1 C^T. Unconstrained diagonal entries default to 1.
PinnedDiagonals diagonals_from_gains(const AgentModel& agent, const Mat& K1,
                                     const std::optional<Mat>& K3, double tol = 1e-9);

}  // namespace poscon
