#include "poscon/serialize.hpp"

#include <fstream>

#include "poscon/error.hpp"

namespace poscon {
namespace {

ControllerKind controller_from(const std::string& s)
{
    if (s == "state_feedback") {
        return ControllerKind::state_feedback;
    }
    if (s == "output_feedback") {
        return ControllerKind::output_feedback;
    }
    throw Error(ErrorCode::ParseError, "unknown controller '" + s + "'");
}

GainMode mode_from(const std::string& s)
{
    if (s == "state_feedback") {
        return GainMode::state_feedback;
    }
    if (s == "output_feedback") {
        return GainMode::output_feedback;
    }
    if (s == "relaxed") {
        return GainMode::relaxed;
    }
    throw Error(ErrorCode::ParseError, "unknown gain mode '" + s + "'");
}

Json optional_number(const std::optional<double>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json matrix_to_json(const Mat& m)
{
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat matrix_from_json(const Json& j)
{
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw Error(ErrorCode::ParseError, "matrix: expected a non-empty list of rows");
    }
    Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m.cols()) {
            throw Error(ErrorCode::ParseError, "matrix: ragged rows");
        }
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
        }
    }
    return m;
}

Json vector_to_json(const Vec& v)
{
    return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vec vector_from_json(const Json& j)
{
    if (!j.is_array()) {
        throw Error(ErrorCode::ParseError, "vector: expected a list of numbers");
    }
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Json certificate_to_json(const FeasibilityCertificate& cert)
{
    Json j;
    j["q"] = vector_to_json(cert.q);
    j["p"] = cert.p ? vector_to_json(*cert.p) : Json(nullptr);
    j["delta"] = cert.delta;
    j["gamma"] = optional_number(cert.gamma);
    j["conditions"] = std::string(to_string(cert.conditions));
    j["pass"] = cert.pass();
    Json margins = Json::array();
    for (const auto& m : cert.margins) {
        margins.push_back({{"name", m.name}, {"value", m.value}, {"pass", m.pass}});
    }
    j["margins"] = std::move(margins);
    return j;
}

FeasibilityCertificate certificate_from_json(const Json& j)
{
    FeasibilityCertificate c;
    c.q = vector_from_json(j.at("q"));
    if (!j.at("p").is_null()) {
        c.p = vector_from_json(j.at("p"));
    }
    c.delta = j.at("delta").get<double>();
    if (!j.at("gamma").is_null()) {
        c.gamma = j.at("gamma").get<double>();
    }
    const auto cond = j.at("conditions").get<std::string>();
    if (cond == "full") {
        c.conditions = ConditionSet::full;
    } else if (cond == "relaxed") {
        c.conditions = ConditionSet::relaxed;
    } else {
        throw Error(ErrorCode::ParseError, "unknown condition set '" + cond + "'");
    }
    for (const auto& m : j.at("margins")) {
        c.margins.push_back({m.at("name").get<std::string>(), m.at("value").get<double>(),
                             m.at("pass").get<bool>()});
    }
    return c;
}

Json gains_to_json(const GainSet& gains, const std::vector<std::string>& labels,
                   const std::vector<std::optional<double>>& minimal_gamma)
{
    Json j;
    j["controller"] = std::string(to_string(gains.controller));
    j["mu"] = gains.mu;
    j["lambda_min"] = gains.lambda_min;
    Json agents = Json::array();
    for (std::size_t i = 0; i < gains.agents.size(); ++i) {
        const auto& g = gains.agents[i];
        Json a;
        if (i < labels.size()) {
            a["label"] = labels[i];
        }
        a["mode"] = std::string(to_string(g.mode));
        a["K1"] = matrix_to_json(g.K1);
        a["K2"] = matrix_to_json(g.K2);
        a["K3"] = g.K3 ? matrix_to_json(*g.K3) : Json(nullptr);
        a["regulator"] = {{"X", matrix_to_json(g.regulator.X)},
                          {"U", matrix_to_json(g.regulator.U)},
                          {"residual", g.regulator.residual},
                          {"unique", g.regulator.unique},
                          {"positive_certified", g.regulator.positive_certified}};
        a["certificate"] = certificate_to_json(g.certificate);
        if (i < minimal_gamma.size()) {
            a["minimal_gamma"] = optional_number(minimal_gamma[i]);
        }
        agents.push_back(std::move(a));
    }
    j["agents"] = std::move(agents);
    return j;
}

GainSet gains_from_json(const Json& j)
{
    try {
        GainSet g;
        g.controller = controller_from(j.at("controller").get<std::string>());
        g.mu = j.at("mu").get<double>();
        g.lambda_min = j.at("lambda_min").get<double>();
        for (const auto& a : j.at("agents")) {
            AgentGains ag;
            ag.mode = mode_from(a.at("mode").get<std::string>());
            ag.K1 = matrix_from_json(a.at("K1"));
            ag.K2 = matrix_from_json(a.at("K2"));
            if (!a.at("K3").is_null()) {
                ag.K3 = matrix_from_json(a.at("K3"));
            }
            const auto& r = a.at("regulator");
            ag.regulator.X = matrix_from_json(r.at("X"));
            ag.regulator.U = matrix_from_json(r.at("U"));
            ag.regulator.residual = r.at("residual").get<double>();
            ag.regulator.unique = r.at("unique").get<bool>();
            ag.regulator.positive_certified = r.at("positive_certified").get<bool>();
            ag.certificate = certificate_from_json(a.at("certificate"));
            g.agents.push_back(std::move(ag));
        }
        return g;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("gains: ") + e.what());
    }
}

void write_gains(const std::filesystem::path& path, const GainSet& gains,
                 const std::vector<std::string>& labels,
                 const std::vector<std::optional<double>>& minimal_gamma)
{
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::InvalidArgument, path.string() + ": cannot write");
    }
    out << gains_to_json(gains, labels, minimal_gamma).dump(2) << '\n';
}

GainSet read_gains(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::ParseError, path.string() + ": cannot open file");
    }
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    return gains_from_json(j);
}

Json audit_to_json(const AuditReport& report)
{
    Json j;
    const auto& p = report.positivity;
    j["positivity"] = {{"pass", p.pass},
                       {"positivity_min", p.positivity_min},
                       {"observer_min", p.observer_min},
                       {"worst_time", p.worst_time}};
    const auto& c = report.consensus;
    j["consensus"] = {{"tail_fraction", c.tail_fraction},
                      {"tail_start", c.tail_start},
                      {"tail_sup", c.tail_sup},
                      {"final_error", c.final_error},
                      {"status", std::string(to_string(c.status))},
                      {"decay_rate_fit", optional_number(c.decay_rate)},
                      {"fit_samples", c.fit_samples},
                      {"fit_window", {c.fit_low, c.fit_high}}};
    if (report.l2) {
        const auto& l = *report.l2;
        j["l2"] = {{"pass", l.pass},
                   {"gamma", l.gamma},
                   {"l2_disturbance", l.disturbance_energy},
                   {"l2_error", l.error_energy},
                   {"kappa", l.kappa},
                   {"l2_bound_slack", l.slack},
                   {"horizon_note", "finite-horizon check; necessary for the infinite-horizon bound"}};
    }
    if (report.generator_bound) {
        const auto& m = *report.generator_bound;
        j["generator_bound"] = {{"pass", m.pass},
                       {"lambda_min", m.lambda_min},
                       {"initial_spread", m.initial_spread},
                       {"margin", m.margin},
                       {"worst_time", m.worst_time}};
    }
    if (!report.kappa.empty()) {
        Json ks = Json::array();
        for (const auto& k : report.kappa) {
            ks.push_back({{"total", k.total()},
                          {"tracking", k.tracking},
                          {"generator", k.generator},
                          {"observer", k.observer},
                          {"iota", k.iota},
                          {"observer_weight", k.observer_weight},
                          {"c_tracking", k.c_tracking},
                          {"c_observer", k.c_observer}});
        }
        j["kappa"] = std::move(ks);
    }
    return j;
}

}  // namespace poscon
