#pragma once

// Agents, consensus pattern, disturbance signals, tolerances and the
// positivity, pattern and connectivity checks that gate every later stage.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "poscon/numerics.hpp"
#include "poscon/topology.hpp"

namespace poscon {

struct ToleranceConfig {
    double zero_tol = 1e-9;
    double definiteness_margin = 1e-7;
    double positivity_slack = 1e-8;
    double regulator_residual_tol = 1e-8;

    /// Throws InvalidArgument unless every field is strictly positive and finite.
    void validate() const;

    friend bool operator==(const ToleranceConfig&, const ToleranceConfig&) = default;
};

/// x' = A x + B u + D d, y = C x.
struct AgentModel {
    std::string label;
    Mat A;
    Mat B;
    Mat C;
    Mat D;

    [[nodiscard]] Eigen::Index states() const { return A.rows(); }
    [[nodiscard]] Eigen::Index inputs() const { return B.cols(); }
    [[nodiscard]] Eigen::Index outputs() const { return C.rows(); }
    [[nodiscard]] Eigen::Index disturbances() const { return D.cols(); }
};

bool operator==(const AgentModel& lhs, const AgentModel& rhs);

/// Consensus pattern x0' = A0 x0, y0 = C0 x0.
struct PatternModel {
    Mat A0;
    Mat C0;

    [[nodiscard]] Eigen::Index states() const { return A0.rows(); }
};

bool operator==(const PatternModel& lhs, const PatternModel& rhs);

/// Nonnegative external input d(t).
class DisturbanceSignal {
public:
    struct Zero {};
    struct AbsSine {
        double amplitude = 1.0;
        double frequency = 1.0;  // rad/s
    };
    struct Constant {
        Vec value;
    };
    /// Piecewise-constant table: row k holds d(t) on [times[k], times[k+1]).
    struct Table {
        std::vector<double> times;
        Mat values;
    };
    using Kind = std::variant<Zero, AbsSine, Constant, Table>;

    DisturbanceSignal() = default;

    static DisturbanceSignal zero(Eigen::Index dim);
    static DisturbanceSignal abs_sine(Eigen::Index dim, double amplitude, double frequency);
    static DisturbanceSignal constant(Vec value);
    static DisturbanceSignal table(std::vector<double> times, Mat values);

    [[nodiscard]] Vec operator()(double t) const;
    [[nodiscard]] Eigen::Index dim() const noexcept { return dim_; }
    [[nodiscard]] const Kind& kind() const noexcept { return kind_; }
    [[nodiscard]] bool is_zero() const;
    /// True for zero and constant signals, which admit exact affine flows.
    [[nodiscard]] bool is_constant() const;

    friend bool operator==(const DisturbanceSignal& lhs, const DisturbanceSignal& rhs);

private:
    DisturbanceSignal(Kind kind, Eigen::Index dim);

    Kind kind_ = Zero{};
    Eigen::Index dim_ = 0;
};

/// Off-diagonal entries >= -tol.
bool is_metzler(const Mat& a, double tol);

/// Every entry >= -tol.
bool is_nonnegative(const Mat& m, double tol);

/// Nonnegative with at least one entry > tol.
bool is_positive(const Mat& m, double tol);

/// Monic characteristic polynomial coefficients, lowest degree first:
/// det(sI - A) = c[0] + c[1] s + ... + s^n.
std::vector<double> characteristic_polynomial(const Mat& a);

/// Roots of a monic real polynomial of degree <= 4 given lowest degree first.
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& monic);

/// Eigenvalues of a small (n <= 4) real matrix. Throws UnsupportedDimension
/// for larger matrices.
std::vector<std::complex<double>> small_eigenvalues(const Mat& a);

struct PatternReport {
    bool metzler = false;
    std::vector<std::complex<double>> eigenvalues;
    double min_real_part = 0.0;
    bool pass = false;
};

/// A0 Metzler with no eigenvalue of real part < -tol.
PatternReport check_pattern(const PatternModel& pattern, double tol);

struct ValidationIssue {
    std::string location;  // e.g. "agent[agent5].A", "graph[2]", "pattern.A0"
    std::string message;

    friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
    friend auto operator<=>(const ValidationIssue&, const ValidationIssue&) = default;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;  // sorted by location

    [[nodiscard]] bool ok() const noexcept { return issues.empty(); }
};

/// Checks positivity of every agent, the pattern spectrum, connectivity of every
/// graph in the family and dimension compatibility. Never throws for model
/// defects; they are listed in the report.
ValidationReport validate_scenario(std::span<const AgentModel> agents, const PatternModel& pattern,
                                   std::span<const Graph> graphs, const ToleranceConfig& tol);

}  // namespace poscon
