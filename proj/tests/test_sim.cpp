#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "poscon/error.hpp"
#include "poscon/numerics.hpp"
#include "poscon/reference_case.hpp"
#include "poscon/sim.hpp"
#include "support/oracles.hpp"
#include "support/random_scenarios.hpp"

using namespace poscon;
using Catch::Approx;

namespace {

LoopMode loop_mode(ControllerKind c)
{
    return c == ControllerKind::output_feedback ? LoopMode::output_feedback : LoopMode::state_feedback;
}

ClosedLoopSystem assemble(const testgen::RandomCase& rc)
{
    const auto& s = rc.scenario;
    return build_closed_loop(s.agents, rc.gains, s.pattern, s.make_schedule(s.horizon), s.disturbance,
                             loop_mode(s.controller), rc.initial, s.tolerances);
}

ClosedLoopSystem reference_loop(const DisturbanceSignal& d, double horizon)
{
    const auto s = reference_scenario();
    const auto g = reproduce_gains(s, s.controller);
    return build_closed_loop(s.agents, g.gains, s.pattern, s.make_schedule(horizon), d, LoopMode::output_feedback,
                             s.resolve_initial(s.seed), s.tolerances);
}

Error expect_error(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e;
    }
    FAIL("expected an error");
    return Error(ErrorCode::InvalidArgument, "");
}

}  // namespace

TEST_CASE("generator: a single node follows the pattern exponential")
{
    const PatternModel pattern{(Mat(2, 2) << 0.0, 0.01, 0.01, 0.0).finished(), Mat::Ones(1, 2)};
    const auto sched = SwitchingSchedule::fixed(Graph(1, {}));
    const std::vector<Vec> w0{(Vec(2) << 1.0, 2.0).finished()};
    const auto sys = build_generator(pattern, sched, 1.0, w0);
    IntegrateOptions o;
    o.horizon = 10.0;
    const auto traj = integrate(sys, o);
    const Vec want = oracle::taylor_expm(pattern.A0, 10.0) * w0[0];
    CHECK(max_abs(traj.generator_state(traj.size() - 1, 0) - want) <= 1e-7);
    CHECK(traj.times.back() == Approx(10.0));
}

TEST_CASE("scalar stable loop decays as exp(-t)")
{
    const std::vector<double> times{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<double> fine;
    for (int k = 0; k <= 100; ++k) {
        fine.push_back(k * 0.01);
    }
    const auto xs = simulate_lti(Mat::Constant(1, 1, -1.0), Vec::Ones(1), fine);
    CHECK(xs.back()(0) == Approx(std::exp(-1.0)).epsilon(1e-9));
    const auto coarse = simulate_lti(Mat::Constant(1, 1, -1.0), Vec::Ones(1), times);
    CHECK(coarse.size() == times.size());
    // Two RK4 steps of length 0.25 apply the degree-4 Taylor polynomial twice.
    const double h = 0.25;
    const double r = 1.0 - h + h * h / 2.0 - h * h * h / 6.0 + h * h * h * h / 24.0;
    CHECK(coarse[2](0) == Approx(r * r).epsilon(1e-14));
}

TEST_CASE("reference trajectory of the reference case")
{
    const auto s = reference_scenario();
    const auto init = s.resolve_initial(s.seed);
    const auto ref = reference_trajectory(s.pattern, *init.w);
    CHECK(max_abs(ref.average_initial() - (Vec(2) << 4.0, 4.5).finished()) <= 1e-14);
    CHECK(ref(0.0)(0) == Approx(8.5));
    const Vec at = oracle::taylor_expm(s.pattern.A0, 3.0) * ref.average_initial();
    CHECK(ref(3.0)(0) == Approx(at.sum()).epsilon(1e-12));
}

TEST_CASE("generator: the average state follows the pattern and states stay nonnegative")
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const auto n = testgen::pick(rng, 2, 6);
        const auto pattern = testgen::random_pattern(rng, static_cast<Eigen::Index>(testgen::pick(rng, 1, 2)));
        std::vector<Graph> family{testgen::random_connected_graph(rng, n, 0.3),
                                  testgen::random_connected_graph(rng, n, 0.3)};
        const auto sched = testgen::random_schedule(rng, family.size(), 8.0);
        const SwitchingSchedule schedule(family, sched.times, sched.active, sched.dwell);
        std::vector<Vec> w0;
        for (std::size_t i = 0; i < n; ++i) {
            Vec w(pattern.A0.rows());
            for (Eigen::Index k = 0; k < w.size(); ++k) {
                w(k) = testgen::uniform(rng, 0.0, 5.0);
            }
            w0.push_back(w);
        }
        const auto sys = build_generator(pattern, schedule, testgen::uniform(rng, 0.5, 3.0), w0);
        IntegrateOptions o;
        o.horizon = 8.0;
        const auto traj = integrate(sys, o);
        const auto ref = reference_trajectory(pattern, w0);
        for (std::size_t k = 0; k < traj.size(); k += 50) {
            Vec avg = Vec::Zero(pattern.A0.rows());
            for (std::size_t i = 0; i < n; ++i) {
                avg += traj.generator_state(k, i);
                CHECK(traj.generator_state(k, i).minCoeff() >= -1e-8);
            }
            avg /= static_cast<double>(n);
            CHECK(max_abs(avg - ref.state(traj.times[k])) <= 1e-8 * (1.0 + max_abs(avg)));
        }
    }
}

TEST_CASE("closed loop: nonnegative data keeps every state nonnegative")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 6; ++trial) {
        testgen::CaseOptions opt;
        opt.horizon = 10.0;
        if (trial % 2 == 0) {
            opt.controller = ControllerKind::state_feedback;
            opt.mode = GainMode::state_feedback;
        }
        const auto rc = testgen::random_case(rng, opt);
        const auto sys = assemble(rc);
        IntegrateOptions o;
        o.horizon = 10.0;
        const auto traj = integrate(sys, o);
        double lowest = 0.0;
        for (const auto& x : traj.states) {
            lowest = std::min(lowest, x.minCoeff());
        }
        CHECK(lowest >= -1e-8);
    }
}

TEST_CASE("switch instants are sample instants")
{
    std::vector<Graph> family{Graph(2, {{0, 1}}), Graph(2, {{0, 1}})};
    const SwitchingSchedule sched(family, {0.0, 0.333, 1.071}, {0, 1, 0}, 0.3);
    const PatternModel pattern{Mat::Zero(1, 1), Mat::Ones(1, 1)};
    const std::vector<Vec> w0{Vec::Ones(1), Vec::Zero(1)};
    const auto sys = build_generator(pattern, sched, 1.0, w0);
    IntegrateOptions o;
    o.horizon = 2.0;
    o.step = 0.1;
    const auto traj = integrate(sys, o);
    REQUIRE(traj.interval_starts.size() == 3);
    CHECK(traj.times[traj.interval_starts[1]] == Approx(0.333).margin(1e-12));
    CHECK(traj.times[traj.interval_starts[2]] == Approx(1.071).margin(1e-12));
    CHECK(traj.times.back() == Approx(2.0).margin(1e-12));
    for (std::size_t k = 1; k < traj.size(); ++k) {
        CHECK(traj.times[k] - traj.times[k - 1] <= 0.1 + 1e-12);
    }
    CHECK(traj.interval_graphs == std::vector<std::size_t>{0, 1, 0});
}

TEST_CASE("RK4 error drops sixteenfold when the step halves")
{
    const Mat m = (Mat(2, 2) << -1.0, 0.5, 0.3, -2.0).finished();
    const Vec x0 = (Vec(2) << 1.0, 2.0).finished();
    const Vec exact = oracle::taylor_expm(m, 2.0) * x0;
    const auto run = [&](double h) {
        std::vector<double> t;
        const int steps = static_cast<int>(std::lround(2.0 / h));
        for (int k = 0; k <= steps; ++k) {
            t.push_back(k * h);
        }
        return max_abs(simulate_lti(m, x0, t).back() - exact);
    };
    const double ratio = run(0.05) / run(0.025);
    CHECK(ratio > 14.0);
    CHECK(ratio < 18.0);
}

TEST_CASE("observer error: autonomous without disturbance, forced by D d otherwise")
{
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 4; ++trial) {
        testgen::CaseOptions opt;
        opt.horizon = 6.0;
        opt.disturbance = trial % 2 == 0 ? testgen::DisturbanceKind::zero : testgen::DisturbanceKind::abs_sine;
        const auto rc = testgen::random_case(rng, opt);
        const auto sys = assemble(rc);
        IntegrateOptions o;
        o.horizon = 6.0;
        const auto traj = integrate(sys, o);
        for (std::size_t i = 0; i < rc.scenario.agents.size(); ++i) {
            const auto& a = rc.scenario.agents[i];
            const Mat obs = a.A - *rc.gains.agents[i].K3 * a.C;
            const Vec e0 = traj.agent_state(0, i) - traj.observer_state(0, i);
            const auto d = rc.scenario.disturbance;
            const auto flow = oracle::rk4(
                [&](double t, const Vec& v) -> Vec { return obs * v + a.D * d(t); }, e0, traj.times);
            double worst = 0.0;
            for (std::size_t k = 0; k < traj.size(); ++k) {
                const Vec err = traj.agent_state(k, i) - traj.observer_state(k, i);
                worst = std::max(worst, max_abs(err - flow[k]) / (1.0 + max_abs(err)));
            }
            CHECK(worst <= 1e-7);
            if (d.is_zero()) {
                const auto free = simulate_lti(obs, e0, traj.times);
                CHECK(max_abs(free.back() - flow.back()) <= 1e-9 * (1.0 + max_abs(flow.back())));
            }
        }
    }
}

TEST_CASE("build errors")
{
    const auto s = reference_scenario();
    const auto g = reproduce_gains(s, s.controller);
    auto init = s.resolve_initial(s.seed);
    auto bad = init;
    bad.x[0](0) = -1.0;
    CHECK(expect_error([&] {
              build_closed_loop(s.agents, g.gains, s.pattern, s.make_schedule(10.0), s.disturbance,
                                LoopMode::output_feedback, bad, s.tolerances);
          }).code() == ErrorCode::NonnegativityViolation);
    auto shape = init;
    shape.x[2] = Vec::Ones(5);
    CHECK(expect_error([&] {
              build_closed_loop(s.agents, g.gains, s.pattern, s.make_schedule(10.0), s.disturbance,
                                LoopMode::output_feedback, shape, s.tolerances);
          }).code() == ErrorCode::DimensionMismatch);
    CHECK(expect_error([&] {
              build_closed_loop(s.agents, g.gains, s.pattern, s.make_schedule(10.0),
                                DisturbanceSignal::zero(2), LoopMode::output_feedback, init, s.tolerances);
          }).code() == ErrorCode::DimensionMismatch);
}

TEST_CASE("divergence guard")
{
    const PatternModel pattern{Mat::Constant(1, 1, 5.0), Mat::Ones(1, 1)};
    const std::vector<Vec> w0{Vec::Ones(1)};
    const auto sys = build_generator(pattern, SwitchingSchedule::fixed(Graph(1, {})), 1.0, w0);
    IntegrateOptions o;
    o.horizon = 10.0;
    o.divergence_bound = 1e6;
    CHECK(expect_error([&] { integrate(sys, o); }).code() == ErrorCode::NonFiniteState);
}

TEST_CASE("output mode: generator starts at zero unless overridden")
{
    const auto s = reference_scenario();
    const auto g = reproduce_gains(s, s.controller);
    auto init = s.resolve_initial(s.seed);
    const auto with_w = build_closed_loop(s.agents, g.gains, s.pattern, s.make_schedule(10.0), s.disturbance,
                                          LoopMode::output_feedback, init, s.tolerances);
    CHECK_FALSE(with_w.warnings.empty());
    init.w.reset();
    const auto without = build_closed_loop(s.agents, g.gains, s.pattern, s.make_schedule(10.0), s.disturbance,
                                           LoopMode::output_feedback, init, s.tolerances);
    CHECK(without.warnings.empty());
    const auto& lay = without.layout;
    CHECK(without.initial_state.segment(lay.w_offset, lay.total - lay.w_offset).isZero());
}

TEST_CASE("exact flow matches RK4 on the reference loop")
{
    const auto sys = reference_loop(DisturbanceSignal::constant(Vec::Constant(1, 0.5)), 20.0);
    IntegrateOptions o;
    o.horizon = 20.0;
    const auto rk = integrate(sys, o);
    o.stepper = Stepper::exact;
    const auto ex = integrate(sys, o);
    REQUIRE(rk.size() == ex.size());
    CHECK(max_abs(rk.states.back() - ex.states.back()) <= 1e-6 * (1.0 + max_abs(ex.states.back())));
    const Vec mid = exact_flow(sys, 0, sys.initial_state, 0.0, 10.0);
    CHECK(max_abs(mid - ex.states[rk.interval_starts[1]]) <= 1e-9 * (1.0 + max_abs(mid)));
}
