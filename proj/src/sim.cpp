#include "poscon/sim.hpp"

#include <cmath>
#include <string>

#include "poscon/error.hpp"

namespace poscon {

namespace {

StateLayout make_layout(LoopMode mode, std::span<const AgentModel> agents, std::size_t count,
                        Eigen::Index n0)
{
    StateLayout layout;
    layout.mode = mode;
    layout.agents = count;
    layout.pattern_states = n0;
    Eigen::Index cursor = 0;
    if (mode != LoopMode::generator_only) {
        for (const auto& ag : agents) {
            layout.x_offset.push_back(cursor);
            layout.x_size.push_back(ag.states());
            cursor += ag.states();
        }
        if (mode == LoopMode::output_feedback) {
            for (const auto& ag : agents) {
                layout.xi_offset.push_back(cursor);
                cursor += ag.states();
            }
        }
    }
    layout.w_offset = cursor;
    layout.total = cursor + static_cast<Eigen::Index>(count) * n0;
    return layout;
}

Mat generator_block(const PatternModel& pattern, const Graph& g, double mu)
{
    const auto n = static_cast<Eigen::Index>(g.size());
    const auto n0 = pattern.states();
    return kron(Mat::Identity(n, n), pattern.A0) - mu * kron(laplacian(g), Mat::Identity(n0, n0));
}

void check_vector(const Vec& v, Eigen::Index size, const std::string& what, double tol)
{
    if (v.size() != size) {
        throw Error(ErrorCode::DimensionMismatch, what + " has length " + std::to_string(v.size()) +
                                                      ", expected " + std::to_string(size));
    }
    require_finite(v, what);
    if (v.size() > 0 && v.minCoeff() < -tol) {
        throw Error(ErrorCode::NonnegativityViolation, what + " has negative entries");
    }
}

Vec average(std::span<const Vec> w0)
{
    if (w0.empty()) {
        throw Error(ErrorCode::InvalidArgument, "no generator states");
    }
    Vec sum = Vec::Zero(w0.front().size());
    for (const auto& w : w0) {
        sum += w;
    }
    return sum / static_cast<double>(w0.size());
}

}  // namespace

std::string_view to_string(LoopMode mode)
{
    switch (mode) {
    case LoopMode::generator_only: return "generator_only";
    case LoopMode::state_feedback: return "state_feedback";
    case LoopMode::output_feedback: return "output_feedback";
    }
    return "unknown";
}

ClosedLoopSystem build_generator(const PatternModel& pattern, const SwitchingSchedule& schedule,
                                 double mu, std::span<const Vec> w0, double tol)
{
    const auto count = schedule.family().front().size();
    if (w0.size() != count) {
        throw Error(ErrorCode::DimensionMismatch, "one generator state per graph node is required");
    }
    ClosedLoopSystem sys;
    sys.mode = LoopMode::generator_only;
    sys.pattern = pattern;
    sys.schedule = schedule;
    sys.mu = mu;
    sys.layout = make_layout(LoopMode::generator_only, {}, count, pattern.states());
    sys.disturbance = DisturbanceSignal::zero(0);
    sys.input = Mat::Zero(sys.layout.total, 0);
    for (const auto& g : schedule.family()) {
        sys.drift.push_back(generator_block(pattern, g, mu));
    }
    sys.initial_state = Vec::Zero(sys.layout.total);
    for (std::size_t i = 0; i < count; ++i) {
        check_vector(w0[i], pattern.states(), "w(0) of agent " + std::to_string(i + 1), tol);
        sys.initial_state.segment(sys.layout.w_index(i), pattern.states()) = w0[i];
    }
    return sys;
}

ClosedLoopSystem build_closed_loop(std::vector<AgentModel> agents, const GainSet& gains,
                                   const PatternModel& pattern, const SwitchingSchedule& schedule,
                                   const DisturbanceSignal& disturbance, LoopMode mode,
                                   const InitialConditions& initial, const ToleranceConfig& tol)
{
    if (mode == LoopMode::generator_only) {
        throw Error(ErrorCode::InvalidArgument, "use build_generator for generator-only systems");
    }
    const std::size_t count = agents.size();
    if (gains.agents.size() != count || schedule.family().front().size() != count) {
        throw Error(ErrorCode::DimensionMismatch, "agents, gains and graphs must agree in count");
    }
    if (initial.x.size() != count) {
        throw Error(ErrorCode::DimensionMismatch, "one initial state per agent is required");
    }
    const bool output = mode == LoopMode::output_feedback;
    const auto n0 = pattern.states();
    const auto q = disturbance.dim();

    ClosedLoopSystem sys;
    sys.mode = mode;
    sys.pattern = pattern;
    sys.schedule = schedule;
    sys.disturbance = disturbance;
    sys.mu = gains.mu;
    sys.gains = gains;
    sys.layout = make_layout(mode, agents, count, n0);
    const auto& lay = sys.layout;

    Mat base = Mat::Zero(lay.total, lay.total);
    sys.input = Mat::Zero(lay.total, q);
    for (std::size_t i = 0; i < count; ++i) {
        const auto& ag = agents[i];
        const auto& g = gains.agents[i];
        const auto n = ag.states();
        const auto xo = lay.x_offset[i];
        const auto wo = lay.w_index(i);
        if (ag.D.cols() != q) {
            throw Error(ErrorCode::DimensionMismatch, ag.label + ": D does not match the disturbance dimension");
        }
        if (g.K1.rows() != ag.inputs() || g.K1.cols() != n || g.K2.cols() != n0) {
            throw Error(ErrorCode::DimensionMismatch, ag.label + ": gain shapes do not match the agent");
        }
        const Mat bk1 = ag.B * g.K1;
        const Mat bk2 = ag.B * g.K2;
        sys.input.block(xo, 0, n, q) = ag.D;
        base.block(xo, wo, n, n0) = bk2;
        if (output) {
            if (!g.K3) {
                throw Error(ErrorCode::DimensionMismatch, ag.label + ": output feedback needs K3");
            }
            const Mat k3c = *g.K3 * ag.C;
            const auto so = lay.xi_offset[i];
            base.block(xo, xo, n, n) = ag.A;
            base.block(xo, so, n, n) = bk1;
            base.block(so, so, n, n) = ag.A - k3c + bk1;
            base.block(so, xo, n, n) = k3c;
            base.block(so, wo, n, n0) = bk2;
        } else {
            base.block(xo, xo, n, n) = ag.A + bk1;
        }
    }
    for (const auto& graph : schedule.family()) {
        Mat m = base;
        m.bottomRightCorner(static_cast<Eigen::Index>(count) * n0, static_cast<Eigen::Index>(count) * n0) =
            generator_block(pattern, graph, gains.mu);
        sys.drift.push_back(std::move(m));
    }

    Vec x0 = Vec::Zero(lay.total);
    for (std::size_t i = 0; i < count; ++i) {
        const std::string who = agents[i].label.empty() ? std::to_string(i + 1) : agents[i].label;
        const auto n = agents[i].states();
        check_vector(initial.x[i], n, "x(0) of " + who, tol.zero_tol);
        x0.segment(lay.x_offset[i], n) = initial.x[i];
        if (output) {
            Vec xi = Vec::Zero(n);
            if (!initial.xi.empty()) {
                if (initial.xi.size() != count || initial.xi[i].size() != n) {
                    throw Error(ErrorCode::DimensionMismatch, "observer initial state of " + who);
                }
                xi = initial.xi[i];
            }
            check_vector(initial.x[i] - xi, n, "x(0) - xi(0) of " + who, tol.zero_tol);
            x0.segment(lay.xi_offset[i], n) = xi;
        }
    }
    if (initial.w) {
        if (initial.w->size() != count) {
            throw Error(ErrorCode::DimensionMismatch, "one generator state per agent is required");
        }
        for (std::size_t i = 0; i < count; ++i) {
            check_vector((*initial.w)[i], n0, "w(0) of agent " + std::to_string(i + 1), tol.zero_tol);
            x0.segment(lay.w_index(i), n0) = (*initial.w)[i];
        }
        if (output && !x0.tail(static_cast<Eigen::Index>(count) * n0).isZero(0.0)) {
            sys.warnings.push_back(
                "output feedback with nonzero w(0): overriding the zero generator initialisation");
        }
    }
    sys.initial_state = std::move(x0);
    sys.agents = std::move(agents);
    return sys;
}

ReferenceTrajectory::ReferenceTrajectory(PatternModel pattern, Vec average_initial)
    : pattern_(std::move(pattern)), w_av0_(std::move(average_initial))
{
    if (w_av0_.size() != pattern_.states()) {
        throw Error(ErrorCode::DimensionMismatch, "reference initial state size");
    }
}

Vec ReferenceTrajectory::state(double t) const
{
    return expm(pattern_.A0, t) * w_av0_;
}

Vec ReferenceTrajectory::operator()(double t) const
{
    return pattern_.C0 * state(t);
}

ReferenceTrajectory reference_trajectory(const PatternModel& pattern, std::span<const Vec> w0)
{
    return {pattern, average(w0)};
}

Vec Trajectory::agent_state(std::size_t sample, std::size_t agent) const
{
    return states[sample].segment(layout.x_offset[agent], layout.x_size[agent]);
}

Vec Trajectory::observer_state(std::size_t sample, std::size_t agent) const
{
    return states[sample].segment(layout.xi_offset[agent], layout.x_size[agent]);
}

Vec Trajectory::generator_state(std::size_t sample, std::size_t agent) const
{
    return states[sample].segment(layout.w_index(agent), layout.pattern_states);
}

Vec Trajectory::agent_error(std::size_t sample, std::size_t agent) const
{
    return errors[sample].segment(static_cast<Eigen::Index>(agent) * output_dim, output_dim);
}

Trajectory integrate(const ClosedLoopSystem& system, const IntegrateOptions& options)
{
    if (!(options.horizon > 0.0) || !(options.step > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "horizon and step must be positive");
    }
    if (options.stepper == Stepper::exact && !system.disturbance.is_constant()) {
        throw Error(ErrorCode::InvalidArgument, "exact stepping needs a zero or constant disturbance");
    }
    const auto& lay = system.layout;
    const auto l = system.output_dim();
    const auto count = lay.agents;
    const auto n0 = lay.pattern_states;

    std::vector<Vec> w0;
    for (std::size_t i = 0; i < count; ++i) {
        w0.push_back(system.initial_state.segment(lay.w_index(i), n0));
    }
    const auto reference = reference_trajectory(system.pattern, w0);

    Trajectory traj;
    traj.layout = lay;
    traj.output_dim = l;

    const auto record = [&](double t, const Vec& x) {
        Vec y(static_cast<Eigen::Index>(count) * l);
        for (std::size_t i = 0; i < count; ++i) {
            const auto row = static_cast<Eigen::Index>(i) * l;
            if (lay.mode == LoopMode::generator_only) {
                y.segment(row, l) = system.pattern.C0 * x.segment(lay.w_index(i), n0);
            } else {
                y.segment(row, l) = system.agents[i].C * x.segment(lay.x_offset[i], lay.x_size[i]);
            }
        }
        const Vec y0 = reference(t);
        Vec e = y - y0.replicate(static_cast<Eigen::Index>(count), 1);
        const Vec d = system.disturbance(t);

        Vec energy = Vec::Zero(static_cast<Eigen::Index>(count));
        double d_energy = 0.0;
        if (!traj.times.empty()) {
            const double dt = t - traj.times.back();
            const Vec& e_prev = traj.errors.back();
            for (std::size_t i = 0; i < count; ++i) {
                const auto row = static_cast<Eigen::Index>(i) * l;
                energy(static_cast<Eigen::Index>(i)) =
                    traj.error_energy.back()(static_cast<Eigen::Index>(i)) +
                    0.5 * dt * (e_prev.segment(row, l).squaredNorm() + e.segment(row, l).squaredNorm());
            }
            d_energy = traj.disturbance_energy.back() +
                       0.5 * dt * (traj.disturbance.back().squaredNorm() + d.squaredNorm());
        }
        traj.times.push_back(t);
        traj.states.push_back(x);
        traj.outputs.push_back(std::move(y));
        traj.reference.push_back(y0);
        traj.errors.push_back(std::move(e));
        traj.disturbance.push_back(d);
        traj.error_energy.push_back(std::move(energy));
        traj.disturbance_energy.push_back(d_energy);
    };

    const auto guard = [&](double t, const Vec& x) {
        if (!x.allFinite() || max_abs(x) > options.divergence_bound) {
            throw Error(ErrorCode::NonFiniteState, "state left the divergence bound at t=" + std::to_string(t));
        }
    };

    Vec x = system.initial_state;
    record(0.0, x);
    for (const auto& iv : system.schedule.intervals(options.horizon)) {
        const Mat& m = system.drift[iv.graph];
        const double length = iv.end - iv.start;
        const auto steps = std::max<long>(1, static_cast<long>(std::ceil(length / options.step - 1e-9)));
        const double h = length / static_cast<double>(steps);
        traj.interval_starts.push_back(traj.times.size() - 1);
        traj.interval_graphs.push_back(iv.graph);

        Mat phi;
        Vec forced;
        if (options.stepper == Stepper::exact) {
            const Vec gd = system.input * system.disturbance(iv.start);
            Mat aug = Mat::Zero(lay.total + 1, lay.total + 1);
            aug.topLeftCorner(lay.total, lay.total) = m;
            aug.topRightCorner(lay.total, 1) = gd;
            const Mat full = expm(aug, h);
            phi = full.topLeftCorner(lay.total, lay.total);
            forced = full.topRightCorner(lay.total, 1);
        }

        for (long k = 0; k < steps; ++k) {
            const double t = iv.start + static_cast<double>(k) * h;
            const double t_next = k + 1 == steps ? iv.end : iv.start + static_cast<double>(k + 1) * h;
            if (options.stepper == Stepper::exact) {
                x = phi * x + forced;
            } else {
                const auto f = [&](double s, const Vec& z) -> Vec {
                    if (system.input.cols() == 0) {
                        return m * z;
                    }
                    return m * z + system.input * system.disturbance(s);
                };
                const Vec k1 = f(t, x);
                const Vec k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
                const Vec k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
                const Vec k4 = f(t + h, x + h * k3);
                x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            guard(t_next, x);
            record(t_next, x);
        }
    }
    return traj;
}

Vec exact_flow(const ClosedLoopSystem& system, std::size_t graph, const Vec& start, double t0,
               double length)
{
    if (!system.disturbance.is_constant()) {
        throw Error(ErrorCode::InvalidArgument, "exact flow needs a zero or constant disturbance");
    }
    const auto total = system.layout.total;
    Mat aug = Mat::Zero(total + 1, total + 1);
    aug.topLeftCorner(total, total) = system.drift.at(graph);
    if (system.input.cols() > 0) {
        aug.topRightCorner(total, 1) = system.input * system.disturbance(t0);
    }
    const Mat full = expm(aug, length);
    return full.topLeftCorner(total, total) * start + full.topRightCorner(total, 1);
}

std::vector<Vec> simulate_lti(const Mat& drift, const Vec& x0, std::span<const double> times)
{
    std::vector<Vec> out;
    out.reserve(times.size());
    Vec x = x0;
    out.push_back(x);
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double h = times[k] - times[k - 1];
        const Vec k1 = drift * x;
        const Vec k2 = drift * (x + 0.5 * h * k1);
        const Vec k3 = drift * (x + 0.5 * h * k2);
        const Vec k4 = drift * (x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push_back(x);
    }
    return out;
}

}  // namespace poscon
