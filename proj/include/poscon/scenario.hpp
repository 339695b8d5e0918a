#pragma once

// Declarative experiment description: agents, pattern, graphs, switching,
// disturbance, initial conditions and run settings. Stored as YAML.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "poscon/model.hpp"
#include "poscon/sim.hpp"
#include "poscon/synthesis.hpp"
#include "poscon/topology.hpp"

namespace poscon {

struct ScheduleSpec {
    enum class Kind { periodic, explicit_times };

    Kind kind = Kind::periodic;
    std::vector<std::size_t> order;  // periodic, 0-based graph indices
    double period = 0.0;
    std::vector<double> times;  // explicit
    std::vector<std::size_t> active;  // explicit, 0-based
    double dwell = 0.0;  // explicit

    friend bool operator==(const ScheduleSpec&, const ScheduleSpec&) = default;
};

struct UniformRange {
    double low = 0.0;
    double high = 1.0;

    friend bool operator==(const UniformRange&, const UniformRange&) = default;
};

/// Each block is either listed per agent or, for x, drawn from `uniform`.
/// Missing xi and w blocks are zero.
struct InitialSpec {
    std::optional<std::vector<Vec>> x;
    std::optional<UniformRange> uniform;
    std::optional<std::vector<Vec>> xi;
    std::optional<std::vector<Vec>> w;
};

bool operator==(const InitialSpec& lhs, const InitialSpec& rhs);

/// Fixed certificate diagonals; delta defaults to the smallest admissible one.
struct PinnedCertificate {
    Vec q;
    std::optional<Vec> p;
    std::optional<double> delta;
};

bool operator==(const PinnedCertificate& lhs, const PinnedCertificate& rhs);

struct Scenario {
    std::string name;
    std::vector<AgentModel> agents;
    std::vector<std::optional<PinnedCertificate>> pinned;  // one slot per agent
    PatternModel pattern;
    std::vector<Graph> graphs;
    ScheduleSpec schedule;
    DisturbanceSignal disturbance;
    InitialSpec initial;
    ControllerKind controller = ControllerKind::output_feedback;
    GainMode mode = GainMode::output_feedback;
    double gamma = 4.0;
    std::optional<double> mu;  // nullopt: select_mu with `mu_margin`
    double mu_margin = 1.0;
    double horizon = 10.0;
    double step = 0.01;
    std::uint64_t seed = 0;
    ToleranceConfig tolerances;

    [[nodiscard]] SwitchingSchedule make_schedule(double until) const;
    [[nodiscard]] double resolve_mu() const;
    /// Draws the uniform blocks with a mt19937_64 seeded by `seed`.
    [[nodiscard]] InitialConditions resolve_initial(std::uint64_t seed) const;
};

bool operator==(const Scenario& lhs, const Scenario& rhs);

/// Throws Error(ParseError) with "<source>:<line>: <field>: <reason>".
Scenario parse_scenario(const std::string& text, const std::string& source = "<string>");
Scenario load_scenario(const std::filesystem::path& path);

/// Numbers are written in shortest round-trip form, so parse(emit(s)) == s.
std::string emit_scenario(const Scenario& scenario);

}  // namespace poscon
