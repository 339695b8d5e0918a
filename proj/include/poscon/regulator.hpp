#pragma once

// Regulator equations  A X + B U - X A0 = 0,  C X - C0 = 0.

#include <cstddef>

#include "poscon/model.hpp"

namespace poscon {

struct RegulatorSolution {
    Mat X;  // n x n0
    Mat U;  // m x n0
    double residual = 0.0;  // max-norm over both equations
    bool unique = true;  // false: the stacked system is rank deficient, minimum-norm pick
    bool positive_certified = false;  // X >= 0 and U >= 0 within zero_tol
};

struct RegulatorOptions {
    /// Alternating-projection budget used when a non-unique minimum-norm
    /// solution has negative entries.
    std::size_t projection_budget = 10'000;
};

/// Max-norm residual of both regulator equations at (X, U).
double regulator_residual(const AgentModel& agent, const PatternModel& pattern, const Mat& X,
                          const Mat& U);

/// Vectorises both equations with vec(A X B) = (B^T kron A) vec(X) and solves
/// the stacked system in the least-squares sense. Throws NoSolution when the
/// residual exceeds `tol.regulator_residual_tol`.
RegulatorSolution solve_regulator(const AgentModel& agent, const PatternModel& pattern,
                                  const ToleranceConfig& tol = {},
                                  const RegulatorOptions& options = {});

}  // namespace poscon
