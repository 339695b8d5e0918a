#pragma once

// Assembly and fixed-step integration of the switched closed loops:
// generator only, state feedback, and observer-based output feedback.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poscon/model.hpp"
#include "poscon/synthesis.hpp"
#include "poscon/topology.hpp"

namespace poscon {

enum class LoopMode { generator_only, state_feedback, output_feedback };

std::string_view to_string(LoopMode mode);

/// Stacked state: all agent states x_i, then all observer states xi_i
/// (output feedback only), then all generator states w_i.
struct StateLayout {
    LoopMode mode = LoopMode::generator_only;
    std::size_t agents = 0;
    Eigen::Index pattern_states = 0;
    std::vector<Eigen::Index> x_offset;
    std::vector<Eigen::Index> x_size;
    std::vector<Eigen::Index> xi_offset;
    Eigen::Index w_offset = 0;
    Eigen::Index total = 0;

    [[nodiscard]] Eigen::Index w_index(std::size_t agent) const
    {
        return w_offset + static_cast<Eigen::Index>(agent) * pattern_states;
    }
};

struct InitialConditions {
    std::vector<Vec> x;
    std::vector<Vec> xi;  // empty: zeros
    std::optional<std::vector<Vec>> w;  // nullopt: zeros
};

struct ClosedLoopSystem {
    LoopMode mode = LoopMode::generator_only;
    StateLayout layout;
    std::vector<AgentModel> agents;
    std::optional<GainSet> gains;
    PatternModel pattern;
    SwitchingSchedule schedule;
    DisturbanceSignal disturbance;
    double mu = 0.0;
    std::vector<Mat> drift;  // one constant drift matrix per graph in the family
    Mat input;  // maps d(t) into the stacked state
    Vec initial_state;
    std::vector<std::string> warnings;

    [[nodiscard]] Eigen::Index output_dim() const { return pattern.C0.rows(); }
};

/// w_i' = A0 w_i + mu sum_j a_ij(t) (w_j - w_i).
ClosedLoopSystem build_generator(const PatternModel& pattern, const SwitchingSchedule& schedule,
                                 double mu, std::span<const Vec> w0, double tol = 1e-9);

/// Attaches the tracking controllers in `gains` to the agents. In output mode
/// w(0) defaults to zero; an explicit w(0) is accepted with a warning.
ClosedLoopSystem build_closed_loop(std::vector<AgentModel> agents, const GainSet& gains,
                                   const PatternModel& pattern, const SwitchingSchedule& schedule,
                                   const DisturbanceSignal& disturbance, LoopMode mode,
                                   const InitialConditions& initial, const ToleranceConfig& tol = {});

/// y0(t) = C0 e^{A0 t} w_av(0).
class ReferenceTrajectory {
public:
    ReferenceTrajectory(PatternModel pattern, Vec average_initial);

    [[nodiscard]] Vec state(double t) const;
    [[nodiscard]] Vec operator()(double t) const;
    [[nodiscard]] const Vec& average_initial() const noexcept { return w_av0_; }

private:
    PatternModel pattern_;
    Vec w_av0_;
};

ReferenceTrajectory reference_trajectory(const PatternModel& pattern, std::span<const Vec> w0);

enum class Stepper { rk4, exact };

struct IntegrateOptions {
    double horizon = 0.0;
    double step = 0.01;
    Stepper stepper = Stepper::rk4;
    double divergence_bound = 1e12;
};

struct Trajectory {
    StateLayout layout;
    Eigen::Index output_dim = 0;
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Vec> outputs;  // stacked y_i
    std::vector<Vec> reference;  // y0
    std::vector<Vec> errors;  // stacked e_i = y_i - y0
    std::vector<Vec> disturbance;
    std::vector<Vec> error_energy;  // running integral of ||e_i||^2, one entry per agent
    std::vector<double> disturbance_energy;  // running integral of ||d||^2
    std::vector<std::size_t> interval_starts;  // sample index at the start of each switching interval
    std::vector<std::size_t> interval_graphs;

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] Vec agent_state(std::size_t sample, std::size_t agent) const;
    [[nodiscard]] Vec observer_state(std::size_t sample, std::size_t agent) const;
    [[nodiscard]] Vec generator_state(std::size_t sample, std::size_t agent) const;
    [[nodiscard]] Vec agent_error(std::size_t sample, std::size_t agent) const;
};

/// Fixed-step integration over [0, horizon]. Each switching interval is split
/// into an integer number of steps no longer than `step`, so switch instants
/// are sample instants. Throws NonFiniteState when the state leaves the
/// divergence bound.
Trajectory integrate(const ClosedLoopSystem& system, const IntegrateOptions& options);

/// Exact flow over one constant-topology stretch [t0, t0 + length] for zero or
/// constant disturbances (augmented matrix exponential).
Vec exact_flow(const ClosedLoopSystem& system, std::size_t graph, const Vec& start, double t0,
               double length);

/// Classical RK4 for x' = M x stepping between consecutive `times`.
std::vector<Vec> simulate_lti(const Mat& drift, const Vec& x0, std::span<const double> times);

}  // namespace poscon
