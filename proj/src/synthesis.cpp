#include "poscon/synthesis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "poscon/error.hpp"

namespace poscon {

namespace {

EntrywiseMargin entrywise(const Mat& m, double tol)
{
    EntrywiseMargin out;
    out.min_entry = m.minCoeff();
    out.max_entry = m.maxCoeff();
    out.pass = out.min_entry >= -tol && out.max_entry > tol;
    return out;
}

DefinitenessMargin definiteness(const Mat& form, double margin_tol)
{
    DefinitenessMargin out;
    const Mat sym = symmetric_part(form);
    out.eigenvalues = sym_eigen(sym).values;
    out.margin = -out.eigenvalues.maxCoeff();
    out.max_diagonal = sym.diagonal().maxCoeff(&out.max_diagonal_index);
    out.pass = out.margin > margin_tol;
    return out;
}

void require_diagonal(const AgentModel& agent, const Vec& d, const char* name)
{
    if (d.size() != agent.states()) {
        throw Error(ErrorCode::DimensionMismatch, std::string(name) + " diagonal has wrong length");
    }
    if (!(d.array() > 0.0).all() || !d.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be diagonal with positive entries");
    }
}

// A Q - B B^T  (entrywise block, before the delta term)
Mat tracking_entrywise(const AgentModel& ag, const Vec& q)
{
    return ag.A * q.asDiagonal() - ag.B * ag.B.transpose();
}

Mat tracking_form(const AgentModel& ag, const Vec& q, std::optional<double> gamma)
{
    const Mat aq = ag.A * q.asDiagonal();
    Mat form = aq + aq.transpose() - 2.0 * ag.B * ag.B.transpose();
    if (gamma) {
        const Mat qc = ag.C * q.asDiagonal();
        form += ag.D * ag.D.transpose() / (*gamma * *gamma) + qc.transpose() * qc;
    }
    return form;
}

// P A - C^T C
Mat observer_entrywise(const AgentModel& ag, const Vec& p)
{
    return p.asDiagonal() * ag.A - ag.C.transpose() * ag.C;
}

Mat observer_form(const AgentModel& ag, const Vec& p)
{
    const Mat pa = p.asDiagonal() * ag.A;
    return pa + pa.transpose() - 2.0 * ag.C.transpose() * ag.C;
}

ConditionMargins tracking_margins(const AgentModel& ag, const Vec& q, double delta,
                                  std::optional<double> gamma, const ToleranceConfig& tol)
{
    require_diagonal(ag, q, "Q");
    const Mat entry = tracking_entrywise(ag, q) + delta * Mat(q.asDiagonal());
    return {entrywise(entry, tol.zero_tol),
            definiteness(tracking_form(ag, q, gamma), tol.definiteness_margin)};
}

// Off-diagonal violations and the delta needed on the diagonal for one
// entrywise block M(d) + delta diag(d).
struct BlockNeeds {
    double violation = 0.0;
    double delta = 0.0;
};

BlockNeeds block_needs(const Mat& m, const Vec& d)
{
    BlockNeeds out;
    out.delta = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (i != j) {
                out.violation += std::max(0.0, -m(i, j));
            }
        }
        out.delta = std::max(out.delta, -m(i, i) / d(i));
    }
    return out;
}

std::vector<NamedMargin> margin_list(const ConditionMargins& tracking,
                                     const std::optional<ConditionMargins>& observer)
{
    std::vector<NamedMargin> out;
    if (observer) {
        out.push_back({"P.entrywise", observer->entrywise.min_entry, observer->entrywise.pass});
        out.push_back({"P.definiteness", observer->definiteness.margin, observer->definiteness.pass});
    }
    out.push_back({"Q.entrywise", tracking.entrywise.min_entry, tracking.entrywise.pass});
    out.push_back({"Q.definiteness", tracking.definiteness.margin, tracking.definiteness.pass});
    return out;
}

std::string describe(const std::vector<NamedMargin>& margins)
{
    std::ostringstream os;
    for (std::size_t k = 0; k < margins.size(); ++k) {
        os << (k ? ", " : "") << margins[k].name << "=" << margins[k].value
           << (margins[k].pass ? " (pass)" : " (fail)");
    }
    return os.str();
}

}  // namespace

std::string_view to_string(ControllerKind kind)
{
    return kind == ControllerKind::state_feedback ? "state_feedback" : "output_feedback";
}

std::string_view to_string(ConditionSet set)
{
    return set == ConditionSet::full ? "full" : "relaxed";
}

std::string_view to_string(GainMode mode)
{
    switch (mode) {
    case GainMode::state_feedback: return "state_feedback";
    case GainMode::output_feedback: return "output_feedback";
    case GainMode::relaxed: return "relaxed";
    }
    return "unknown";
}

ConditionMargins check_state_conditions(const AgentModel& agent, const Vec& q_diag, double delta,
                                        double gamma, const ToleranceConfig& tol)
{
    if (!(gamma > 0.0) || !(delta > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "gamma and delta must be positive");
    }
    return tracking_margins(agent, q_diag, delta, gamma, tol);
}

ConditionMargins check_relaxed_conditions(const AgentModel& agent, const Vec& q_diag, double delta,
                                          const ToleranceConfig& tol)
{
    if (!(delta > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "delta must be positive");
    }
    return tracking_margins(agent, q_diag, delta, std::nullopt, tol);
}

OutputMargins check_output_conditions(const AgentModel& agent, const Vec& p_diag, const Vec& q_diag,
                                      double delta, std::optional<double> gamma,
                                      const ToleranceConfig& tol)
{
    if (!(delta > 0.0) || (gamma && !(*gamma > 0.0))) {
        throw Error(ErrorCode::InvalidArgument, "gamma and delta must be positive");
    }
    require_diagonal(agent, p_diag, "P");
    const Mat entry = observer_entrywise(agent, p_diag) + delta * Mat(p_diag.asDiagonal());
    OutputMargins out;
    out.observer = {entrywise(entry, tol.zero_tol),
                    definiteness(observer_form(agent, p_diag), tol.definiteness_margin)};
    out.tracking = tracking_margins(agent, q_diag, delta, gamma, tol);
    return out;
}

bool FeasibilityCertificate::pass() const
{
    return !margins.empty() &&
           std::all_of(margins.begin(), margins.end(), [](const auto& m) { return m.pass; });
}

FeasibilityCertificate certify(const AgentModel& agent, const Vec& q_diag,
                               const std::optional<Vec>& p_diag, double delta,
                               std::optional<double> gamma, const ToleranceConfig& tol)
{
    FeasibilityCertificate cert;
    cert.q = q_diag;
    cert.p = p_diag;
    cert.delta = delta;
    cert.gamma = gamma;
    cert.conditions = gamma ? ConditionSet::full : ConditionSet::relaxed;
    if (p_diag) {
        const auto m = check_output_conditions(agent, *p_diag, q_diag, delta, gamma, tol);
        cert.margins = margin_list(m.tracking, m.observer);
    } else {
        const auto m = gamma ? check_state_conditions(agent, q_diag, delta, *gamma, tol)
                             : check_relaxed_conditions(agent, q_diag, delta, tol);
        cert.margins = margin_list(m, std::nullopt);
    }
    return cert;
}

double minimal_delta(const AgentModel& agent, const Vec& q_diag, const std::optional<Vec>& p_diag)
{
    double need = block_needs(tracking_entrywise(agent, q_diag), q_diag).delta;
    if (p_diag) {
        need = std::max(need, block_needs(observer_entrywise(agent, *p_diag), *p_diag).delta);
    }
    return need;
}

InfeasibleError::InfeasibleError(const std::string& message, std::vector<NamedMargin> best)
    : Error(ErrorCode::Infeasible, message + " [best: " + describe(best) + "]"), best_(std::move(best))
{
}

FeasibilityCertificate search_certificate(const AgentModel& agent, const SearchOptions& options,
                                          const ToleranceConfig& tol)
{
    const auto n = agent.states();
    if (n > 6) {
        throw Error(ErrorCode::UnsupportedDimension, "certificate search supports n <= 6");
    }
    const bool output = options.controller == ControllerKind::output_feedback;
    const std::optional<double> gamma =
        options.conditions == ConditionSet::full ? std::optional<double>(options.gamma) : std::nullopt;
    const double lo = std::log10(options.diag_min);
    const double hi = std::log10(options.diag_max);
    const Eigen::Index dims = output ? 2 * n : n;

    struct Point {
        Vec theta;
        double score = -std::numeric_limits<double>::infinity();
        double delta = 0.0;
        bool feasible = false;
    };

    std::size_t evaluations = 0;
    const auto evaluate = [&](const Vec& theta) {
        ++evaluations;
        Point pt;
        pt.theta = theta;
        const Vec q = theta.head(n).unaryExpr([](double t) { return std::pow(10.0, t); });
        const BlockNeeds qneeds = block_needs(tracking_entrywise(agent, q), q);
        double violation = qneeds.violation;
        double need = qneeds.delta;
        double def = -max_sym_eigenvalue(tracking_form(agent, q, gamma));
        if (output) {
            const Vec p = theta.tail(n).unaryExpr([](double t) { return std::pow(10.0, t); });
            const BlockNeeds pneeds = block_needs(observer_entrywise(agent, p), p);
            violation += pneeds.violation;
            need = std::max(need, pneeds.delta);
            def = std::min(def, -max_sym_eigenvalue(observer_form(agent, p)));
        }
        pt.delta = std::max(options.delta_min, need + 1e-6);
        violation += std::max(0.0, pt.delta - options.delta_max);
        pt.score = def - tol.definiteness_margin - violation;
        pt.feasible = violation == 0.0 && def > tol.definiteness_margin;
        return pt;
    };

    const auto finish = [&](const Point& pt) -> std::optional<FeasibilityCertificate> {
        const Vec q = pt.theta.head(n).unaryExpr([](double t) { return std::pow(10.0, t); });
        std::optional<Vec> p;
        if (output) {
            p = pt.theta.tail(n).unaryExpr([](double t) { return std::pow(10.0, t); });
        }
        auto cert = certify(agent, q, p, pt.delta, gamma, tol);
        if (cert.pass()) {
            return cert;
        }
        return std::nullopt;
    };

    // Scalar diagonals, from the identity outward.
    Point best;
    constexpr std::array<double, 9> offsets{0.0, 0.5, -0.5, 1.0, -1.0, 1.5, -1.5, 2.0, -2.0};
    for (double off : offsets) {
        const double t = std::clamp(off, lo, hi);
        Point pt = evaluate(Vec::Constant(dims, t));
        if (pt.feasible) {
            if (auto cert = finish(pt)) {
                return *cert;
            }
        }
        if (pt.score > best.score) {
            best = pt;
        }
    }

    // Coordinate refinement on the worst margin.
    double step = 0.5;
    while (evaluations < options.budget && step > 1e-7) {
        bool improved = false;
        for (Eigen::Index k = 0; k < dims && evaluations < options.budget; ++k) {
            for (double dir : {1.0, -1.0}) {
                Vec theta = best.theta;
                theta(k) = std::clamp(theta(k) + dir * step, lo, hi);
                if (theta(k) == best.theta(k)) {
                    continue;
                }
                Point pt = evaluate(theta);
                if (pt.feasible) {
                    if (auto cert = finish(pt)) {
                        return *cert;
                    }
                }
                if (pt.score > best.score) {
                    best = pt;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) {
            step *= 0.5;
        }
    }

    const Vec q = best.theta.head(n).unaryExpr([](double t) { return std::pow(10.0, t); });
    std::optional<Vec> p;
    if (output) {
        p = best.theta.tail(n).unaryExpr([](double t) { return std::pow(10.0, t); });
    }
    const auto best_cert = certify(agent, q, p, best.delta, gamma, tol);
    throw InfeasibleError("no certificate found for " + agent.label + " after " +
                              std::to_string(evaluations) + " evaluations",
                          best_cert.margins);
}

std::optional<double> bisect_gamma(const AgentModel& agent, ControllerKind controller, double lo,
                                   double hi, double resolution, const ToleranceConfig& tol,
                                   std::size_t budget)
{
    if (!(lo > 0.0) || !(hi > lo) || !(resolution > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "bisect_gamma: need 0 < lo < hi and resolution > 0");
    }
    const auto feasible = [&](double gamma) {
        SearchOptions opts;
        opts.controller = controller;
        opts.conditions = ConditionSet::full;
        opts.gamma = gamma;
        opts.budget = budget;
        try {
            (void)search_certificate(agent, opts, tol);
            return true;
        } catch (const InfeasibleError&) {
            return false;
        }
    };
    if (!feasible(hi)) {
        return std::nullopt;
    }
    if (feasible(lo)) {
        return lo;
    }
    while (hi - lo > resolution) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

AgentGains compute_gains(const AgentModel& agent, const FeasibilityCertificate& cert,
                         const RegulatorSolution& regulator, ControllerKind controller,
                         const ToleranceConfig& tol)
{
    const auto fail = [&](const std::string& what) {
        throw Error(ErrorCode::InvariantViolation, agent.label + ": " + what);
    };
    if (!cert.pass()) {
        fail("certificate does not pass: " + describe(cert.margins));
    }
    if (!regulator.positive_certified) {
        fail("regulator solution is not certified nonnegative");
    }
    if (controller == ControllerKind::output_feedback && !cert.p) {
        fail("output feedback needs a certificate with P");
    }

    AgentGains out;
    out.regulator = regulator;
    out.certificate = cert;
    out.mode = cert.conditions == ConditionSet::relaxed
                   ? GainMode::relaxed
                   : (controller == ControllerKind::output_feedback ? GainMode::output_feedback
                                                                     : GainMode::state_feedback);

    const Vec q_inv = cert.q.cwiseInverse();
    out.K1 = -agent.B.transpose() * q_inv.asDiagonal();
    out.K2 = regulator.U - out.K1 * regulator.X;

    if (!is_nonnegative(-out.K1, tol.zero_tol)) {
        fail("-K1 has negative entries");
    }
    if (!is_nonnegative(out.K2, tol.zero_tol)) {
        fail("K2 has negative entries");
    }
    const Mat closed = agent.A + agent.B * out.K1;
    if (!is_metzler(closed, tol.zero_tol)) {
        fail("A + B K1 is not Metzler");
    }
    const Mat lyap = q_inv.asDiagonal() * closed;
    if (max_sym_eigenvalue(lyap + lyap.transpose()) >= 0.0) {
        fail("A + B K1 fails the diagonal Lyapunov test");
    }

    if (controller == ControllerKind::output_feedback) {
        const Vec& p = *cert.p;
        out.K3 = p.cwiseInverse().asDiagonal() * agent.C.transpose();
        const Mat observer = agent.A - *out.K3 * agent.C;
        if (!is_metzler(observer, tol.zero_tol)) {
            fail("A - K3 C is not Metzler");
        }
        const Mat pl = p.asDiagonal() * observer;
        if (max_sym_eigenvalue(pl + pl.transpose()) >= 0.0) {
            fail("A - K3 C fails the diagonal Lyapunov test");
        }
    }
    return out;
}

double mu_lower_bound(const PatternModel& pattern, std::span<const Graph> graphs,
                      const ToleranceConfig& tol)
{
    // A lone node has no disagreement to damp.
    if (!graphs.empty() && graphs.front().size() == 1) {
        return 1.0;
    }
    const double lam = min_lambda2(graphs);
    if (lam <= tol.zero_tol) {
        throw Error(ErrorCode::DisconnectedGraph, "min algebraic connectivity is not positive");
    }
    return spectral_norm(pattern.A0) / lam + 1.0;
}

double select_mu(const PatternModel& pattern, std::span<const Graph> graphs, double margin,
                 const ToleranceConfig& tol)
{
    if (!(margin >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "mu margin must be >= 0");
    }
    return mu_lower_bound(pattern, graphs, tol) + margin;
}

bool validate_mu(double mu, const PatternModel& pattern, std::span<const Graph> graphs,
                 const ToleranceConfig& tol)
{
    return mu >= mu_lower_bound(pattern, graphs, tol);
}

PinnedDiagonals diagonals_from_gains(const AgentModel& agent, const Mat& K1,
                                     const std::optional<Mat>& K3, double tol)
{
    const auto n = agent.states();
    if (K1.rows() != agent.inputs() || K1.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch, "K1 has the wrong shape");
    }
    PinnedDiagonals out;
    out.q = Vec::Ones(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < agent.inputs(); ++k) {
            if (std::abs(agent.B(j, k)) > tol && std::abs(K1(k, j)) > tol) {
                out.q(j) = -agent.B(j, k) / K1(k, j);
                break;
            }
        }
    }
    if ((out.q.array() <= 0.0).any() ||
        max_abs(K1 + agent.B.transpose() * out.q.cwiseInverse().asDiagonal()) > 1e-6) {
        throw Error(ErrorCode::InvalidArgument, agent.label + ": K1 is not -B^T Q^-1 for a positive diagonal Q");
    }
    if (K3) {
        if (K3->rows() != n || K3->cols() != agent.outputs()) {
            throw Error(ErrorCode::DimensionMismatch, "K3 has the wrong shape");
        }
        Vec p = Vec::Ones(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index k = 0; k < agent.outputs(); ++k) {
                if (std::abs(agent.C(k, j)) > tol && std::abs((*K3)(j, k)) > tol) {
                    p(j) = agent.C(k, j) / (*K3)(j, k);
                    break;
                }
            }
        }
        if ((p.array() <= 0.0).any() ||
            max_abs(*K3 - p.cwiseInverse().asDiagonal() * agent.C.transpose()) > 1e-6) {
            throw Error(ErrorCode::InvalidArgument, agent.label + ": K3 is not P^-1 C^T for a positive diagonal P");
        }
        out.p = p;
    }
    return out;
}

}  // namespace poscon
