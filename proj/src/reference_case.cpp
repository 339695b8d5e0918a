#include "poscon/reference_case.hpp"

#include <sstream>

#include "poscon/error.hpp"
#include "poscon/regulator.hpp"

namespace poscon {
namespace {

Mat rows(std::initializer_list<std::initializer_list<double>> values)
{
    Mat m(static_cast<Eigen::Index>(values.size()),
          static_cast<Eigen::Index>(values.begin()->size()));
    Eigen::Index r = 0;
    for (const auto& row : values) {
        Eigen::Index c = 0;
        for (double v : row) {
            m(r, c++) = v;
        }
        ++r;
    }
    return m;
}

enum class PlantClass { three_state, integrator, sink };

PlantClass class_of(int agent)
{
    switch (agent) {
    case 1: case 2: case 7: return PlantClass::three_state;
    case 3: case 4: return PlantClass::integrator;
    default: return PlantClass::sink;
    }
}

AgentModel plant(int agent)
{
    AgentModel m;
    m.label = std::to_string(agent);
    switch (class_of(agent)) {
    case PlantClass::three_state:
        m.A = rows({{-2, 1, 1}, {1, -3, 0}, {1, 1, -1}});
        m.B = rows({{0}, {0}, {1}});
        m.C = rows({{0, 0, 1}});
        m.D = rows({{1}, {0}, {0}});
        break;
    case PlantClass::integrator:
        m.A = rows({{-2, 1}, {0, 0}});
        m.B = rows({{0}, {1}});
        m.C = rows({{0, 1}});
        m.D = rows({{1}, {1}});
        break;
    case PlantClass::sink:
        m.A = rows({{0, 0}, {1, -3}});
        m.B = rows({{1}, {0}});
        m.C = rows({{2, 0}});
        m.D = rows({{1}, {1}});
        break;
    }
    return m;
}

PublishedAgent published(int agent)
{
    switch (class_of(agent)) {
    case PlantClass::three_state:
        return {rows({{0.5960, 0.5960}, {0.1980, 0.1980}, {1, 1}}), rows({{0.2160, 0.2160}}),
                rows({{0, 0, -1}}), rows({{1.2160, 1.2160}}), rows({{0}, {0}, {1}})};
    case PlantClass::integrator:
        return {rows({{0.4975, 0.4975}, {1.0000, 1.0000}}), rows({{0.0100, 0.0100}}),
                rows({{0, -1}}), rows({{1.0100, 1.0100}}), rows({{0}, {1}})};
    case PlantClass::sink:
        break;
    }
    return {rows({{0.5000, 0.5000}, {0.1661, 0.1661}}), rows({{0.0050, 0.0050}}), rows({{-1, 0}}),
            rows({{0.5050, 0.5050}}), rows({{1}, {0}})};
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

Scenario reference_scenario()
{
    Scenario s;
    s.name = "eight_agent_reference";
    s.pattern.A0 = rows({{0.01, 0.01}, {0, 0}});
    s.pattern.C0 = rows({{1, 1}});
    std::vector<Vec> w0;
    for (int i = 1; i <= 8; ++i) {
        s.agents.push_back(plant(i));
        const auto pub = published(i);
        const auto pin = diagonals_from_gains(s.agents.back(), pub.K1, pub.K3);
        s.pinned.push_back(PinnedCertificate{pin.q, pin.p, std::nullopt});
        Vec w(2);
        w << i - 0.5, i;
        w0.push_back(w);
    }
    s.graphs.push_back(Graph::from_one_based(
        8, {{1, 2}, {2, 3}, {4, 1}, {4, 5}, {3, 6}, {3, 5}, {7, 1}, {8, 2}, {8, 7}}));
    s.graphs.push_back(
        Graph::from_one_based(8, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {6, 3}, {7, 5}, {8, 4}}));
    s.schedule.kind = ScheduleSpec::Kind::periodic;
    s.schedule.order = {0, 1};
    s.schedule.period = 10.0;
    s.disturbance = DisturbanceSignal::zero(1);
    s.initial.uniform = UniformRange{0.0, 7.0};
    s.initial.w = w0;
    s.controller = ControllerKind::output_feedback;
    s.mode = GainMode::output_feedback;
    s.gamma = 4.0;
    s.mu = 3.0;
    s.horizon = 200.0;
    s.step = 0.01;
    s.seed = 20240917;
    return s;
}

std::vector<PublishedAgent> published_values()
{
    std::vector<PublishedAgent> out;
    for (int i = 1; i <= 8; ++i) {
        out.push_back(published(i));
    }
    return out;
}

ReproducedGains reproduce_gains(const Scenario& scenario, ControllerKind controller)
{
    const auto& tol = scenario.tolerances;
    const bool output = controller == ControllerKind::output_feedback;
    ReproducedGains out;
    out.gains.controller = controller;
    out.gains.lambda_min = min_lambda2(scenario.graphs);
    out.gains.mu = scenario.resolve_mu();

    for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
        const auto& agent = scenario.agents[i];
        if (i >= scenario.pinned.size() || !scenario.pinned[i]) {
            throw Error(ErrorCode::MissingCertificate, "agent " + agent.label + ": no pinned certificate");
        }
        const auto& pin = *scenario.pinned[i];
        const std::optional<Vec> p = output ? pin.p : std::nullopt;
        if (output && !p) {
            throw Error(ErrorCode::MissingCertificate, "agent " + agent.label + ": no pinned P");
        }
        const double delta = pin.delta ? *pin.delta : minimal_delta(agent, pin.q, p);
        const auto regulator = solve_regulator(agent, scenario.pattern, tol);

        auto cert = certify(agent, pin.q, p, delta, scenario.gamma, tol);
        if (!cert.pass()) {
            ConditionMargins full = check_state_conditions(agent, pin.q, delta, scenario.gamma, tol);
            std::string block = "Q";
            if (output) {
                const auto om = check_output_conditions(agent, *p, pin.q, delta, scenario.gamma, tol);
                if (om.tracking.pass()) {
                    full = om.observer;
                    block = "P";
                }
            }
            auto relaxed = certify(agent, pin.q, p, delta, std::nullopt, tol);
            if (!relaxed.pass()) {
                throw InfeasibleError("agent " + agent.label +
                                          ": neither full nor relaxed conditions hold at the pinned certificate",
                                      relaxed.margins);
            }
            const auto k = full.definiteness.max_diagonal_index;
            out.notes.push_back(
                "agent " + agent.label + ": full conditions fail at gamma = " + fmt(scenario.gamma) +
                " (" + block + " definiteness margin " + fmt(full.definiteness.margin) + ", diagonal entry (" +
                std::to_string(k + 1) + "," + std::to_string(k + 1) + ") = " +
                fmt(full.definiteness.max_diagonal) + "); relaxed conditions hold, gains use them");
            cert = std::move(relaxed);
        }
        auto gains = compute_gains(agent, cert, regulator, controller, tol);
        out.gains.agents.push_back(std::move(gains));
    }
    return out;
}

}  // namespace poscon
