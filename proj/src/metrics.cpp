#include "poscon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "poscon/error.hpp"

namespace poscon {

std::string_view to_string(DecayStatus status)
{
    switch (status) {
    case DecayStatus::fitted: return "fitted";
    case DecayStatus::insufficient_decay: return "insufficient_decay";
    case DecayStatus::skipped_disturbed: return "skipped_disturbed";
    }
    return "unknown";
}

PositivityAudit audit_positivity(const Trajectory& traj, double slack)
{
    const auto& lay = traj.layout;
    PositivityAudit out;
    out.positivity_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const Vec& s = traj.states[k];
        double lowest = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < lay.agents; ++i) {
            if (lay.mode != LoopMode::generator_only) {
                lowest = std::min(lowest, s.segment(lay.x_offset[i], lay.x_size[i]).minCoeff());
            }
            if (lay.mode == LoopMode::output_feedback) {
                out.observer_min =
                    std::min(out.observer_min, s.segment(lay.xi_offset[i], lay.x_size[i]).minCoeff());
            }
        }
        if (lay.pattern_states > 0 && lay.agents > 0) {
            lowest = std::min(lowest, s.tail(lay.total - lay.w_offset).minCoeff());
        }
        if (lowest < out.positivity_min) {
            out.positivity_min = lowest;
            out.worst_time = traj.times[k];
        }
    }
    if (!std::isfinite(out.positivity_min)) {
        out.positivity_min = 0.0;
    }
    out.pass = out.positivity_min >= -slack;
    return out;
}

bool ConsensusAudit::converged(double threshold) const
{
    return std::all_of(tail_sup.begin(), tail_sup.end(), [&](double v) { return v <= threshold; });
}

ConsensusAudit audit_consensus(const Trajectory& traj, double tail_fraction)
{
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "tail fraction must lie in (0, 1]");
    }
    if (traj.size() == 0) {
        throw Error(ErrorCode::InvalidArgument, "empty trajectory");
    }
    ConsensusAudit out;
    out.tail_fraction = tail_fraction;
    const auto count = traj.layout.agents;
    const double horizon = traj.times.back();
    out.tail_start = horizon * (1.0 - tail_fraction);
    out.tail_sup.assign(count, 0.0);
    out.final_error.assign(count, 0.0);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        if (traj.times[k] + 1e-12 < out.tail_start) {
            continue;
        }
        for (std::size_t i = 0; i < count; ++i) {
            out.tail_sup[i] = std::max(out.tail_sup[i], traj.agent_error(k, i).norm());
        }
    }
    for (std::size_t i = 0; i < count; ++i) {
        out.final_error[i] = traj.agent_error(traj.size() - 1, i).norm();
    }

    const bool disturbed = std::any_of(traj.disturbance.begin(), traj.disturbance.end(),
                                       [](const Vec& d) { return d.size() > 0 && !d.isZero(0.0); });
    if (disturbed) {
        out.status = DecayStatus::skipped_disturbed;
        return out;
    }

    // Least-squares line through (t, log ||e||) on the fit window.
    double sum_t = 0.0, sum_y = 0.0, sum_tt = 0.0, sum_ty = 0.0;
    std::size_t samples = 0;
    bool dropped = false;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double norm = traj.errors[k].norm();
        if (norm < out.fit_high) {
            dropped = true;
        }
        if (norm >= out.fit_low && norm <= out.fit_high) {
            const double t = traj.times[k];
            const double y = std::log(norm);
            sum_t += t;
            sum_y += y;
            sum_tt += t * t;
            sum_ty += t * y;
            ++samples;
        }
    }
    out.fit_samples = samples;
    const double denom = static_cast<double>(samples) * sum_tt - sum_t * sum_t;
    if (!dropped || samples < 2 || denom <= 0.0) {
        out.status = DecayStatus::insufficient_decay;
        return out;
    }
    out.decay_rate = (static_cast<double>(samples) * sum_ty - sum_t * sum_y) / denom;
    out.status = DecayStatus::fitted;
    return out;
}

std::vector<KappaBreakdown> auto_kappa(const ClosedLoopSystem& system, double lambda_min)
{
    if (!system.gains || system.mode == LoopMode::generator_only) {
        throw Error(ErrorCode::MissingCertificate, "kappa needs synthesized gains");
    }
    const auto& lay = system.layout;
    if (lay.agents > 1 && !(lambda_min > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "lambda_min must be positive");
    }
    const auto n0 = lay.pattern_states;
    const bool output = system.mode == LoopMode::output_feedback;

    std::vector<Vec> w0;
    for (std::size_t i = 0; i < lay.agents; ++i) {
        w0.push_back(system.initial_state.segment(lay.w_index(i), n0));
    }
    const Vec w_av = reference_trajectory(system.pattern, w0).average_initial();
    double spread = 0.0;
    for (const auto& w : w0) {
        spread += (w - w_av).squaredNorm();
    }
    const double v_w = 0.5 * spread;

    std::vector<KappaBreakdown> out;
    for (std::size_t i = 0; i < lay.agents; ++i) {
        const auto& ag = system.agents[i];
        const auto& g = system.gains->agents[i];
        const auto& cert = g.certificate;
        const Vec q_inv = cert.q.cwiseInverse();

        // Decay constant c with  form < -c Q^2.
        const Mat aq = ag.A * cert.q.asDiagonal();
        Mat form = aq + aq.transpose() - 2.0 * ag.B * ag.B.transpose();
        if (cert.gamma) {
            const Mat qc = ag.C * cert.q.asDiagonal();
            form += ag.D * ag.D.transpose() / (*cert.gamma * *cert.gamma) + qc.transpose() * qc;
        }
        const Mat scaled = q_inv.asDiagonal() * form * q_inv.asDiagonal();
        KappaBreakdown kb;
        kb.c_tracking = -max_sym_eigenvalue(scaled);
        if (!(kb.c_tracking > 0.0)) {
            throw Error(ErrorCode::InvariantViolation, ag.label + ": certificate has no decay margin");
        }

        const double weight = output ? 4.0 : 2.0;
        const double coupling = spectral_norm(q_inv.asDiagonal() * ag.B * g.K2);
        if (lay.agents > 1) {
            kb.iota = (2.0 / lambda_min) * std::max(weight / kb.c_tracking * coupling * coupling, 1.0);
        }
        kb.generator = kb.iota * v_w;

        const Vec x0 = system.initial_state.segment(lay.x_offset[i], lay.x_size[i]);
        const Vec tilde = x0 - g.regulator.X * w_av;
        kb.tracking = tilde.dot(q_inv.asDiagonal() * tilde);

        if (output) {
            if (!cert.p || !g.K3) {
                throw Error(ErrorCode::MissingCertificate, ag.label + ": output feedback without P");
            }
            const Vec& p = *cert.p;
            const Mat pa = p.asDiagonal() * (ag.A - *g.K3 * ag.C);
            kb.c_observer = -max_sym_eigenvalue(pa + pa.transpose());
            if (!(kb.c_observer > 0.0)) {
                throw Error(ErrorCode::InvariantViolation, ag.label + ": observer has no decay margin");
            }
            const double leak = spectral_norm(q_inv.asDiagonal() * ag.B * g.K1);
            kb.observer_weight =
                (2.0 / kb.c_observer) * std::max(4.0 / kb.c_tracking * leak * leak, 1.0);
            const Vec bar = x0 - system.initial_state.segment(lay.xi_offset[i], lay.x_size[i]);
            kb.observer = kb.observer_weight * bar.dot(p.asDiagonal() * bar);
        }
        out.push_back(kb);
    }
    return out;
}

L2Audit audit_l2_gain(const Trajectory& traj, double gamma, std::span<const double> kappa)
{
    const auto count = traj.layout.agents;
    if (kappa.size() != count) {
        throw Error(ErrorCode::DimensionMismatch, "one kappa per agent is required");
    }
    if (traj.size() == 0) {
        throw Error(ErrorCode::InvalidArgument, "empty trajectory");
    }
    L2Audit out;
    out.gamma = gamma;
    out.disturbance_energy = traj.disturbance_energy.back();
    out.pass = true;
    for (std::size_t i = 0; i < count; ++i) {
        const double e = traj.error_energy.back()(static_cast<Eigen::Index>(i));
        const double slack = gamma * gamma * out.disturbance_energy + kappa[i] - e;
        out.error_energy.push_back(e);
        out.kappa.push_back(kappa[i]);
        out.slack.push_back(slack);
        out.pass = out.pass && slack >= 0.0;
    }
    return out;
}

Vec generator_disagreement(const Trajectory& traj, std::size_t sample)
{
    const auto& lay = traj.layout;
    const auto n0 = lay.pattern_states;
    Vec avg = Vec::Zero(n0);
    for (std::size_t i = 0; i < lay.agents; ++i) {
        avg += traj.generator_state(sample, i);
    }
    avg /= static_cast<double>(lay.agents);
    Vec out(static_cast<Eigen::Index>(lay.agents) * n0);
    for (std::size_t i = 0; i < lay.agents; ++i) {
        out.segment(static_cast<Eigen::Index>(i) * n0, n0) = traj.generator_state(sample, i) - avg;
    }
    return out;
}

GeneratorBoundAudit audit_generator_bound(const Trajectory& traj, double lambda_min)
{
    if (traj.size() == 0) {
        throw Error(ErrorCode::InvalidArgument, "empty trajectory");
    }
    GeneratorBoundAudit out;
    out.lambda_min = lambda_min;
    out.initial_spread = generator_disagreement(traj, 0).norm();
    out.margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double bound = out.initial_spread * std::exp(-lambda_min * traj.times[k]);
        const double gap = bound - generator_disagreement(traj, k).norm();
        if (gap < out.margin) {
            out.margin = gap;
            out.worst_time = traj.times[k];
        }
    }
    // Absolute floor covers rounding when the nodes start in agreement.
    out.pass = out.margin >= -(1e-6 * out.initial_spread + 1e-12);
    return out;
}

}  // namespace poscon
