#include "poscon/regulator.hpp"

#include <string>

#include "poscon/error.hpp"

namespace poscon {

double regulator_residual(const AgentModel& agent, const PatternModel& pattern, const Mat& X,
                          const Mat& U)
{
    const Mat first = agent.A * X + agent.B * U - X * pattern.A0;
    const Mat second = agent.C * X - pattern.C0;
    return std::max(max_abs(first), max_abs(second));
}

RegulatorSolution solve_regulator(const AgentModel& agent, const PatternModel& pattern,
                                  const ToleranceConfig& tol, const RegulatorOptions& options)
{
    const auto n = agent.states();
    const auto m = agent.inputs();
    const auto l = agent.outputs();
    const auto n0 = pattern.states();
    if (pattern.C0.rows() != l || pattern.C0.cols() != n0 || agent.C.cols() != n ||
        agent.B.rows() != n) {
        throw Error(ErrorCode::DimensionMismatch, "regulator equations: incompatible shapes for " +
                                                      agent.label);
    }

    const Mat eye_n0 = Mat::Identity(n0, n0);
    const Mat eye_n = Mat::Identity(n, n);
    const auto unknown_x = n * n0;
    const auto unknown_u = m * n0;

    Mat system = Mat::Zero(n * n0 + l * n0, unknown_x + unknown_u);
    system.topLeftCorner(n * n0, unknown_x) = kron(eye_n0, agent.A) - kron(pattern.A0.transpose(), eye_n);
    system.topRightCorner(n * n0, unknown_u) = kron(eye_n0, agent.B);
    system.bottomLeftCorner(l * n0, unknown_x) = kron(eye_n0, agent.C);
    Vec rhs = Vec::Zero(system.rows());
    rhs.tail(l * n0) = vec(pattern.C0);

    const auto ls = least_squares(system, rhs);
    Vec z = ls.solution.col(0);

    RegulatorSolution out;
    out.unique = ls.rank == system.cols();
    out.X = unvec(z.head(unknown_x), n, n0);
    out.U = unvec(z.tail(unknown_u), m, n0);
    out.residual = regulator_residual(agent, pattern, out.X, out.U);
    if (out.residual > tol.regulator_residual_tol) {
        throw Error(ErrorCode::NoSolution, "regulator equations for " + agent.label +
                                               " have least-squares residual " +
                                               std::to_string(out.residual));
    }

    const auto nonneg = [&](const Vec& v) { return v.size() == 0 || v.minCoeff() >= -tol.zero_tol; };

    if (!nonneg(z) && !out.unique) {
        // Search the affine solution set z0 + span(N) for a nonnegative point by
        // alternating projections onto it and onto the nonnegative orthant.
        const Mat& basis = ls.null_space;
        const Vec& base = ls.solution.col(0);
        Vec candidate = z;
        for (std::size_t it = 0; it < options.projection_budget; ++it) {
            const Vec clipped = candidate.cwiseMax(0.0);
            candidate = base + basis * (basis.transpose() * (clipped - base));
            if (nonneg(candidate)) {
                const Mat X = unvec(candidate.head(unknown_x), n, n0);
                const Mat U = unvec(candidate.tail(unknown_u), m, n0);
                const double residual = regulator_residual(agent, pattern, X, U);
                if (residual <= tol.regulator_residual_tol) {
                    z = candidate;
                    out.X = X;
                    out.U = U;
                    out.residual = residual;
                }
                break;
            }
        }
    }

    out.positive_certified = nonneg(z);
    return out;
}

}  // namespace poscon
