#include "poscon/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <array>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

#include "poscon/error.hpp"

namespace poscon {
namespace {

bool same(const Vec& a, const Vec& b)
{
    return a.size() == b.size() && (a.size() == 0 || a == b);
}

bool same(const std::optional<Vec>& a, const std::optional<Vec>& b)
{
    return a.has_value() == b.has_value() && (!a || same(*a, *b));
}

bool same(const std::optional<std::vector<Vec>>& a, const std::optional<std::vector<Vec>>& b)
{
    if (a.has_value() != b.has_value()) {
        return false;
    }
    if (!a) {
        return true;
    }
    if (a->size() != b->size()) {
        return false;
    }
    for (std::size_t i = 0; i < a->size(); ++i) {
        if (!same((*a)[i], (*b)[i])) {
            return false;
        }
    }
    return true;
}

// ---- parsing ---------------------------------------------------------------

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& field,
                           const std::string& reason) const
    {
        std::ostringstream os;
        os << source_;
        if (node.IsDefined() && node.Mark().line >= 0) {
            os << ':' << node.Mark().line + 1;
        }
        os << ": " << field << ": " << reason;
        throw Error(ErrorCode::ParseError, os.str());
    }

    YAML::Node require(const YAML::Node& parent, const std::string& key,
                       const std::string& field) const
    {
        if (!parent.IsMap()) {
            fail(parent, field, "expected a mapping");
        }
        YAML::Node n = parent[key];
        if (!n) {
            fail(parent, field + "." + key, "missing");
        }
        return n;
    }

    double number(const YAML::Node& n, const std::string& field) const
    {
        if (!n.IsScalar()) {
            fail(n, field, "expected a number");
        }
        const std::string& s = n.Scalar();
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            fail(n, field, "expected a number, got '" + s + "'");
        }
        return v;
    }

    std::size_t index(const YAML::Node& n, const std::string& field) const
    {
        const double v = number(n, field);
        if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
            fail(n, field, "expected a nonnegative integer");
        }
        return static_cast<std::size_t>(v);
    }

    std::uint64_t seed(const YAML::Node& n, const std::string& field) const
    {
        if (!n.IsScalar()) {
            fail(n, field, "expected an integer");
        }
        const std::string& s = n.Scalar();
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            fail(n, field, "expected a 64-bit unsigned integer");
        }
        return v;
    }

    std::string text(const YAML::Node& n, const std::string& field) const
    {
        if (!n.IsScalar()) {
            fail(n, field, "expected a string");
        }
        return n.Scalar();
    }

    std::vector<double> numbers(const YAML::Node& n, const std::string& field) const
    {
        if (!n.IsSequence()) {
            fail(n, field, "expected a list of numbers");
        }
        std::vector<double> out;
        for (std::size_t k = 0; k < n.size(); ++k) {
            out.push_back(number(n[k], field + "[" + std::to_string(k) + "]"));
        }
        return out;
    }

    Vec vector(const YAML::Node& n, const std::string& field) const
    {
        const auto v = numbers(n, field);
        return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
    }

    // Rows as lists of numbers.
    Mat matrix(const YAML::Node& n, const std::string& field) const
    {
        if (!n.IsSequence() || n.size() == 0) {
            fail(n, field, "expected a non-empty list of rows");
        }
        std::vector<std::vector<double>> rows;
        for (std::size_t r = 0; r < n.size(); ++r) {
            rows.push_back(numbers(n[r], field + "[" + std::to_string(r) + "]"));
            if (rows.back().size() != rows.front().size() || rows.back().empty()) {
                fail(n[r], field, "rows must be non-empty and of equal length");
            }
        }
        Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            }
        }
        return m;
    }

    std::vector<Vec> vectors(const YAML::Node& n, const std::string& field) const
    {
        if (!n.IsSequence()) {
            fail(n, field, "expected one list per agent");
        }
        std::vector<Vec> out;
        for (std::size_t k = 0; k < n.size(); ++k) {
            out.push_back(vector(n[k], field + "[" + std::to_string(k) + "]"));
        }
        return out;
    }

private:
    std::string source_;
};

ControllerKind parse_controller(const Reader& rd, const YAML::Node& n)
{
    const auto s = rd.text(n, "controller");
    if (s == "state") {
        return ControllerKind::state_feedback;
    }
    if (s == "output") {
        return ControllerKind::output_feedback;
    }
    rd.fail(n, "controller", "expected 'state' or 'output', got '" + s + "'");
}

GainMode parse_mode(const Reader& rd, const YAML::Node& n)
{
    const auto s = rd.text(n, "mode");
    if (s == "state") {
        return GainMode::state_feedback;
    }
    if (s == "output") {
        return GainMode::output_feedback;
    }
    if (s == "relaxed") {
        return GainMode::relaxed;
    }
    rd.fail(n, "mode", "expected 'state', 'output' or 'relaxed', got '" + s + "'");
}

DisturbanceSignal parse_disturbance(const Reader& rd, const YAML::Node& n)
{
    const auto kind = rd.text(rd.require(n, "kind", "disturbance"), "disturbance.kind");
    try {
        if (kind == "zero") {
            return DisturbanceSignal::zero(
                static_cast<Eigen::Index>(rd.index(rd.require(n, "dim", "disturbance"), "disturbance.dim")));
        }
        if (kind == "abs_sine") {
            return DisturbanceSignal::abs_sine(
                static_cast<Eigen::Index>(rd.index(rd.require(n, "dim", "disturbance"), "disturbance.dim")),
                rd.number(rd.require(n, "amplitude", "disturbance"), "disturbance.amplitude"),
                rd.number(rd.require(n, "frequency", "disturbance"), "disturbance.frequency"));
        }
        if (kind == "constant") {
            return DisturbanceSignal::constant(
                rd.vector(rd.require(n, "value", "disturbance"), "disturbance.value"));
        }
        if (kind == "table") {
            return DisturbanceSignal::table(
                rd.numbers(rd.require(n, "times", "disturbance"), "disturbance.times"),
                rd.matrix(rd.require(n, "values", "disturbance"), "disturbance.values"));
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError) {
            throw;
        }
        rd.fail(n, "disturbance", e.what());
    }
    rd.fail(n, "disturbance.kind", "unknown kind '" + kind + "'");
}

Scenario parse_node(const YAML::Node& root, const Reader& rd)
{
    if (!root.IsMap()) {
        rd.fail(root, "<root>", "expected a mapping");
    }
    Scenario s;
    if (root["name"]) {
        s.name = rd.text(root["name"], "name");
    }

    const auto pattern = rd.require(root, "pattern", "<root>");
    s.pattern.A0 = rd.matrix(rd.require(pattern, "A0", "pattern"), "pattern.A0");
    s.pattern.C0 = rd.matrix(rd.require(pattern, "C0", "pattern"), "pattern.C0");

    const auto agents = rd.require(root, "agents", "<root>");
    if (!agents.IsSequence() || agents.size() == 0) {
        rd.fail(agents, "agents", "expected a non-empty list");
    }
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const auto& a = agents[i];
        const std::string f = "agents[" + std::to_string(i) + "]";
        AgentModel ag;
        ag.label = a["label"] ? rd.text(a["label"], f + ".label") : std::to_string(i + 1);
        ag.A = rd.matrix(rd.require(a, "A", f), f + ".A");
        ag.B = rd.matrix(rd.require(a, "B", f), f + ".B");
        ag.C = rd.matrix(rd.require(a, "C", f), f + ".C");
        ag.D = rd.matrix(rd.require(a, "D", f), f + ".D");
        s.agents.push_back(std::move(ag));
        if (const auto c = a["certificate"]) {
            PinnedCertificate pin;
            pin.q = rd.vector(rd.require(c, "q", f + ".certificate"), f + ".certificate.q");
            if (c["p"]) {
                pin.p = rd.vector(c["p"], f + ".certificate.p");
            }
            if (c["delta"]) {
                pin.delta = rd.number(c["delta"], f + ".certificate.delta");
            }
            s.pinned.emplace_back(std::move(pin));
        } else {
            s.pinned.emplace_back();
        }
    }

    const auto graphs = rd.require(root, "graphs", "<root>");
    if (!graphs.IsSequence() || graphs.size() == 0) {
        rd.fail(graphs, "graphs", "expected a non-empty list");
    }
    for (std::size_t p = 0; p < graphs.size(); ++p) {
        const auto& g = graphs[p];
        const std::string f = "graphs[" + std::to_string(p) + "]";
        const auto nodes = g["nodes"] ? rd.index(g["nodes"], f + ".nodes") : s.agents.size();
        const auto edges = rd.require(g, "edges", f);
        if (!edges.IsSequence()) {
            rd.fail(edges, f + ".edges", "expected a list of [a, b] pairs");
        }
        std::vector<std::pair<std::size_t, std::size_t>> list;
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const std::string fe = f + ".edges[" + std::to_string(k) + "]";
            if (!edges[k].IsSequence() || edges[k].size() != 2) {
                rd.fail(edges[k], fe, "expected a pair");
            }
            list.emplace_back(rd.index(edges[k][0], fe), rd.index(edges[k][1], fe));
        }
        try {
            s.graphs.push_back(Graph::from_one_based(nodes, list));
        } catch (const Error& e) {
            rd.fail(g, f, e.what());
        }
    }

    const auto sched = rd.require(root, "schedule", "<root>");
    if (const auto per = sched["periodic"]) {
        s.schedule.kind = ScheduleSpec::Kind::periodic;
        for (double v : rd.numbers(rd.require(per, "order", "schedule.periodic"), "schedule.periodic.order")) {
            if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
                rd.fail(per["order"], "schedule.periodic.order", "graph numbers start at 1");
            }
            s.schedule.order.push_back(static_cast<std::size_t>(v) - 1);
        }
        s.schedule.period = rd.number(rd.require(per, "period", "schedule.periodic"), "schedule.periodic.period");
    } else if (const auto ex = sched["explicit"]) {
        s.schedule.kind = ScheduleSpec::Kind::explicit_times;
        s.schedule.times = rd.numbers(rd.require(ex, "times", "schedule.explicit"), "schedule.explicit.times");
        for (double v : rd.numbers(rd.require(ex, "active", "schedule.explicit"), "schedule.explicit.active")) {
            if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
                rd.fail(ex["active"], "schedule.explicit.active", "graph numbers start at 1");
            }
            s.schedule.active.push_back(static_cast<std::size_t>(v) - 1);
        }
        s.schedule.dwell = rd.number(rd.require(ex, "dwell", "schedule.explicit"), "schedule.explicit.dwell");
    } else {
        rd.fail(sched, "schedule", "expected 'periodic' or 'explicit'");
    }

    s.disturbance = root["disturbance"] ? parse_disturbance(rd, root["disturbance"])
                                        : DisturbanceSignal::zero(s.agents.front().D.cols());

    if (const auto init = root["initial"]) {
        if (init["x"]) {
            s.initial.x = rd.vectors(init["x"], "initial.x");
        }
        if (const auto u = init["uniform"]) {
            s.initial.uniform = UniformRange{rd.number(rd.require(u, "low", "initial.uniform"), "initial.uniform.low"),
                                             rd.number(rd.require(u, "high", "initial.uniform"), "initial.uniform.high")};
            if (!(s.initial.uniform->low <= s.initial.uniform->high)) {
                rd.fail(u, "initial.uniform", "low must not exceed high");
            }
        }
        if (init["xi"]) {
            s.initial.xi = rd.vectors(init["xi"], "initial.xi");
        }
        if (init["w"]) {
            s.initial.w = rd.vectors(init["w"], "initial.w");
        }
    }
    if (!s.initial.x && !s.initial.uniform) {
        rd.fail(root, "initial", "either 'x' or 'uniform' is required");
    }

    if (root["controller"]) {
        s.controller = parse_controller(rd, root["controller"]);
    }
    if (root["mode"]) {
        s.mode = parse_mode(rd, root["mode"]);
    }
    if (root["gamma"]) {
        s.gamma = rd.number(root["gamma"], "gamma");
    }
    if (root["mu"]) {
        s.mu = rd.number(root["mu"], "mu");
    }
    if (root["mu_margin"]) {
        s.mu_margin = rd.number(root["mu_margin"], "mu_margin");
    }
    if (root["horizon"]) {
        s.horizon = rd.number(root["horizon"], "horizon");
    }
    if (root["step"]) {
        s.step = rd.number(root["step"], "step");
    }
    if (root["seed"]) {
        s.seed = rd.seed(root["seed"], "seed");
    }
    if (const auto t = root["tolerances"]) {
        if (t["zero_tol"]) {
            s.tolerances.zero_tol = rd.number(t["zero_tol"], "tolerances.zero_tol");
        }
        if (t["definiteness_margin"]) {
            s.tolerances.definiteness_margin = rd.number(t["definiteness_margin"], "tolerances.definiteness_margin");
        }
        if (t["positivity_slack"]) {
            s.tolerances.positivity_slack = rd.number(t["positivity_slack"], "tolerances.positivity_slack");
        }
        if (t["regulator_residual_tol"]) {
            s.tolerances.regulator_residual_tol =
                rd.number(t["regulator_residual_tol"], "tolerances.regulator_residual_tol");
        }
        try {
            s.tolerances.validate();
        } catch (const Error& e) {
            rd.fail(t, "tolerances", e.what());
        }
    }

    if (!(s.gamma > 0.0)) {
        rd.fail(root["gamma"], "gamma", "must be positive");
    }
    if (!(s.horizon > 0.0)) {
        rd.fail(root["horizon"], "horizon", "must be positive");
    }
    if (!(s.step > 0.0)) {
        rd.fail(root["step"], "step", "must be positive");
    }
    return s;
}

// ---- emitting --------------------------------------------------------------

std::string num(double v)
{
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

void emit_vector(YAML::Emitter& out, const Vec& v)
{
    out << YAML::Flow << YAML::BeginSeq;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        out << num(v(k));
    }
    out << YAML::EndSeq;
}

void emit_matrix(YAML::Emitter& out, const Mat& m)
{
    out << YAML::Flow << YAML::BeginSeq;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        emit_vector(out, m.row(r).transpose());
    }
    out << YAML::EndSeq;
}

void emit_vectors(YAML::Emitter& out, const std::vector<Vec>& vs)
{
    out << YAML::BeginSeq;
    for (const auto& v : vs) {
        emit_vector(out, v);
    }
    out << YAML::EndSeq;
}

}  // namespace

bool operator==(const InitialSpec& lhs, const InitialSpec& rhs)
{
    return same(lhs.x, rhs.x) && lhs.uniform == rhs.uniform && same(lhs.xi, rhs.xi) &&
           same(lhs.w, rhs.w);
}

bool operator==(const PinnedCertificate& lhs, const PinnedCertificate& rhs)
{
    return same(lhs.q, rhs.q) && same(lhs.p, rhs.p) && lhs.delta == rhs.delta;
}

bool operator==(const Scenario& lhs, const Scenario& rhs)
{
    return lhs.name == rhs.name && lhs.agents == rhs.agents && lhs.pinned == rhs.pinned &&
           lhs.pattern == rhs.pattern && lhs.graphs == rhs.graphs && lhs.schedule == rhs.schedule &&
           lhs.disturbance == rhs.disturbance && lhs.initial == rhs.initial &&
           lhs.controller == rhs.controller && lhs.mode == rhs.mode && lhs.gamma == rhs.gamma &&
           lhs.mu == rhs.mu && lhs.mu_margin == rhs.mu_margin && lhs.horizon == rhs.horizon &&
           lhs.step == rhs.step && lhs.seed == rhs.seed && lhs.tolerances == rhs.tolerances;
}

SwitchingSchedule Scenario::make_schedule(double until) const
{
    if (schedule.kind == ScheduleSpec::Kind::periodic) {
        return SwitchingSchedule::periodic(graphs, schedule.order, schedule.period, until);
    }
    return SwitchingSchedule(graphs, schedule.times, schedule.active, schedule.dwell);
}

double Scenario::resolve_mu() const
{
    return mu ? *mu : select_mu(pattern, graphs, mu_margin, tolerances);
}

InitialConditions Scenario::resolve_initial(std::uint64_t rng_seed) const
{
    InitialConditions ic;
    if (initial.x) {
        ic.x = *initial.x;
    } else {
        std::mt19937_64 rng(rng_seed);
        std::uniform_real_distribution<double> draw(initial.uniform->low, initial.uniform->high);
        for (const auto& ag : agents) {
            Vec x(ag.states());
            for (Eigen::Index k = 0; k < x.size(); ++k) {
                x(k) = draw(rng);
            }
            ic.x.push_back(std::move(x));
        }
    }
    if (initial.xi) {
        ic.xi = *initial.xi;
    }
    ic.w = initial.w;
    return ic;
}

Scenario parse_scenario(const std::string& text, const std::string& source)
{
    const Reader rd(source);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        std::ostringstream os;
        os << source << ':' << e.mark.line + 1 << ": " << e.msg;
        throw Error(ErrorCode::ParseError, os.str());
    }
    try {
        return parse_node(root, rd);
    } catch (const YAML::Exception& e) {
        std::ostringstream os;
        os << source << ':' << e.mark.line + 1 << ": " << e.msg;
        throw Error(ErrorCode::ParseError, os.str());
    }
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::ParseError, path.string() + ": cannot open file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.string());
}

std::string emit_scenario(const Scenario& s)
{
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << s.name;
    out << YAML::Key << "controller" << YAML::Value
        << (s.controller == ControllerKind::state_feedback ? "state" : "output");
    out << YAML::Key << "mode" << YAML::Value
        << (s.mode == GainMode::state_feedback ? "state"
            : s.mode == GainMode::output_feedback ? "output"
                                                  : "relaxed");
    out << YAML::Key << "gamma" << YAML::Value << num(s.gamma);
    if (s.mu) {
        out << YAML::Key << "mu" << YAML::Value << num(*s.mu);
    }
    out << YAML::Key << "mu_margin" << YAML::Value << num(s.mu_margin);
    out << YAML::Key << "horizon" << YAML::Value << num(s.horizon);
    out << YAML::Key << "step" << YAML::Value << num(s.step);
    out << YAML::Key << "seed" << YAML::Value << std::to_string(s.seed);

    out << YAML::Key << "pattern" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "A0" << YAML::Value;
    emit_matrix(out, s.pattern.A0);
    out << YAML::Key << "C0" << YAML::Value;
    emit_matrix(out, s.pattern.C0);
    out << YAML::EndMap;

    out << YAML::Key << "agents" << YAML::Value << YAML::BeginSeq;
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
        const auto& ag = s.agents[i];
        out << YAML::BeginMap;
        out << YAML::Key << "label" << YAML::Value << YAML::DoubleQuoted << ag.label;
        out << YAML::Key << "A" << YAML::Value;
        emit_matrix(out, ag.A);
        out << YAML::Key << "B" << YAML::Value;
        emit_matrix(out, ag.B);
        out << YAML::Key << "C" << YAML::Value;
        emit_matrix(out, ag.C);
        out << YAML::Key << "D" << YAML::Value;
        emit_matrix(out, ag.D);
        if (i < s.pinned.size() && s.pinned[i]) {
            const auto& pin = *s.pinned[i];
            out << YAML::Key << "certificate" << YAML::Value << YAML::BeginMap;
            out << YAML::Key << "q" << YAML::Value;
            emit_vector(out, pin.q);
            if (pin.p) {
                out << YAML::Key << "p" << YAML::Value;
                emit_vector(out, *pin.p);
            }
            if (pin.delta) {
                out << YAML::Key << "delta" << YAML::Value << num(*pin.delta);
            }
            out << YAML::EndMap;
        }
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "graphs" << YAML::Value << YAML::BeginSeq;
    for (const auto& g : s.graphs) {
        out << YAML::BeginMap;
        out << YAML::Key << "nodes" << YAML::Value << g.size();
        out << YAML::Key << "edges" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (const auto& e : g.edges()) {
            out << YAML::Flow << YAML::BeginSeq << e.a + 1 << e.b + 1 << YAML::EndSeq;
        }
        out << YAML::EndSeq << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "schedule" << YAML::Value << YAML::BeginMap;
    if (s.schedule.kind == ScheduleSpec::Kind::periodic) {
        out << YAML::Key << "periodic" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "order" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (auto k : s.schedule.order) {
            out << k + 1;
        }
        out << YAML::EndSeq;
        out << YAML::Key << "period" << YAML::Value << num(s.schedule.period);
        out << YAML::EndMap;
    } else {
        out << YAML::Key << "explicit" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "times" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (double t : s.schedule.times) {
            out << num(t);
        }
        out << YAML::EndSeq;
        out << YAML::Key << "active" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (auto k : s.schedule.active) {
            out << k + 1;
        }
        out << YAML::EndSeq;
        out << YAML::Key << "dwell" << YAML::Value << num(s.schedule.dwell);
        out << YAML::EndMap;
    }
    out << YAML::EndMap;

    out << YAML::Key << "disturbance" << YAML::Value << YAML::BeginMap;
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, DisturbanceSignal::Zero>) {
                out << YAML::Key << "kind" << YAML::Value << "zero";
                out << YAML::Key << "dim" << YAML::Value << s.disturbance.dim();
            } else if constexpr (std::is_same_v<K, DisturbanceSignal::AbsSine>) {
                out << YAML::Key << "kind" << YAML::Value << "abs_sine";
                out << YAML::Key << "dim" << YAML::Value << s.disturbance.dim();
                out << YAML::Key << "amplitude" << YAML::Value << num(k.amplitude);
                out << YAML::Key << "frequency" << YAML::Value << num(k.frequency);
            } else if constexpr (std::is_same_v<K, DisturbanceSignal::Constant>) {
                out << YAML::Key << "kind" << YAML::Value << "constant";
                out << YAML::Key << "value" << YAML::Value;
                emit_vector(out, k.value);
            } else {
                out << YAML::Key << "kind" << YAML::Value << "table";
                out << YAML::Key << "times" << YAML::Value << YAML::Flow << YAML::BeginSeq;
                for (double t : k.times) {
                    out << num(t);
                }
                out << YAML::EndSeq;
                out << YAML::Key << "values" << YAML::Value;
                emit_matrix(out, k.values);
            }
        },
        s.disturbance.kind());
    out << YAML::EndMap;

    out << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
    if (s.initial.x) {
        out << YAML::Key << "x" << YAML::Value;
        emit_vectors(out, *s.initial.x);
    }
    if (s.initial.uniform) {
        out << YAML::Key << "uniform" << YAML::Value << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "low" << YAML::Value << num(s.initial.uniform->low);
        out << YAML::Key << "high" << YAML::Value << num(s.initial.uniform->high);
        out << YAML::EndMap;
    }
    if (s.initial.xi) {
        out << YAML::Key << "xi" << YAML::Value;
        emit_vectors(out, *s.initial.xi);
    }
    if (s.initial.w) {
        out << YAML::Key << "w" << YAML::Value;
        emit_vectors(out, *s.initial.w);
    }
    out << YAML::EndMap;

    out << YAML::Key << "tolerances" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "zero_tol" << YAML::Value << num(s.tolerances.zero_tol);
    out << YAML::Key << "definiteness_margin" << YAML::Value << num(s.tolerances.definiteness_margin);
    out << YAML::Key << "positivity_slack" << YAML::Value << num(s.tolerances.positivity_slack);
    out << YAML::Key << "regulator_residual_tol" << YAML::Value
        << num(s.tolerances.regulator_residual_tol);
    out << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace poscon
