#include "poscon/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "poscon/error.hpp"

namespace poscon {

namespace {

bool same_matrix(const Mat& a, const Mat& b)
{
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

using Complex = std::complex<double>;

Complex eval_poly(const std::vector<double>& c, Complex s)
{
    Complex acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * s + *it;
    }
    return acc;
}

Complex eval_derivative(const std::vector<double>& c, Complex s)
{
    Complex acc = 0.0;
    for (std::size_t k = c.size() - 1; k >= 1; --k) {
        acc = acc * s + static_cast<double>(k) * c[k];
    }
    return acc;
}

double cauchy_bound(const std::vector<double>& monic)
{
    double top = 0.0;
    for (std::size_t k = 0; k + 1 < monic.size(); ++k) {
        top = std::max(top, std::abs(monic[k]));
    }
    return 1.0 + top;
}

// A real root of a monic odd-degree polynomial by bisection on the Cauchy
// bracket, followed by Newton polishing.
double bracket_real_root(const std::vector<double>& monic)
{
    const auto p = [&](double x) { return eval_poly(monic, x).real(); };
    double lo = -cauchy_bound(monic);
    double hi = -lo;
    double plo = p(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double pm = p(mid);
        if (pm == 0.0) {
            return mid;
        }
        if ((pm < 0.0) == (plo < 0.0)) {
            lo = mid;
            plo = pm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Positive root of 8m^3 + 8p m^2 + (2p^2 - 8r) m - q^2 with q != 0; the cubic
// is negative at 0 and positive for large m.
double resolvent_root(double p, double q, double r)
{
    const std::vector<double> monic{-q * q / 8.0, (2.0 * p * p - 8.0 * r) / 8.0, p, 1.0};
    const auto f = [&](double m) { return eval_poly(monic, m).real(); };
    double lo = 0.0;
    double hi = cauchy_bound(monic);
    for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<Complex> quadratic_roots(double b, double c)
{
    // s^2 + b s + c
    const double disc = b * b - 4.0 * c;
    if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        // Numerically stable pairing.
        const double q = -0.5 * (b + std::copysign(sq, b));
        if (q == 0.0) {
            return {0.0, 0.0};
        }
        return {Complex(q, 0.0), Complex(c / q, 0.0)};
    }
    const double re = -0.5 * b;
    const double im = 0.5 * std::sqrt(-disc);
    return {Complex(re, im), Complex(re, -im)};
}

std::vector<Complex> quadratic_roots_complex(Complex b, Complex c)
{
    const Complex sq = std::sqrt(b * b - 4.0 * c);
    return {0.5 * (-b + sq), 0.5 * (-b - sq)};
}

// Divides monic p by (s - root) for a real root.
std::vector<double> deflate(const std::vector<double>& monic, double root)
{
    const std::size_t n = monic.size() - 1;
    std::vector<double> out(n);
    double carry = monic[n];
    for (std::size_t k = n; k-- > 0;) {
        out[k] = carry;
        carry = monic[k] + carry * root;
    }
    return out;
}

void polish(const std::vector<double>& monic, std::vector<Complex>& roots)
{
    for (auto& z : roots) {
        for (int it = 0; it < 4; ++it) {
            const Complex d = eval_derivative(monic, z);
            if (std::abs(d) < 1e-14) {
                break;
            }
            const Complex step = eval_poly(monic, z) / d;
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
                break;
            }
            const Complex candidate = z - step;
            if (std::abs(eval_poly(monic, candidate)) < std::abs(eval_poly(monic, z))) {
                z = candidate;
            } else {
                break;
            }
        }
    }
}

}  // namespace

void ToleranceConfig::validate() const
{
    for (double v : {zero_tol, definiteness_margin, positivity_slack, regulator_residual_tol}) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error(ErrorCode::InvalidArgument, "tolerances must be strictly positive");
        }
    }
}

bool operator==(const AgentModel& lhs, const AgentModel& rhs)
{
    return lhs.label == rhs.label && same_matrix(lhs.A, rhs.A) && same_matrix(lhs.B, rhs.B) &&
           same_matrix(lhs.C, rhs.C) && same_matrix(lhs.D, rhs.D);
}

bool operator==(const PatternModel& lhs, const PatternModel& rhs)
{
    return same_matrix(lhs.A0, rhs.A0) && same_matrix(lhs.C0, rhs.C0);
}

DisturbanceSignal::DisturbanceSignal(Kind kind, Eigen::Index dim) : kind_(std::move(kind)), dim_(dim)
{
}

DisturbanceSignal DisturbanceSignal::zero(Eigen::Index dim)
{
    return {Zero{}, dim};
}

DisturbanceSignal DisturbanceSignal::abs_sine(Eigen::Index dim, double amplitude, double frequency)
{
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude) || !std::isfinite(frequency)) {
        throw Error(ErrorCode::InvalidArgument, "abs_sine amplitude must be finite and >= 0");
    }
    return {AbsSine{amplitude, frequency}, dim};
}

DisturbanceSignal DisturbanceSignal::constant(Vec value)
{
    require_finite(value, "constant disturbance");
    if ((value.array() < 0.0).any()) {
        throw Error(ErrorCode::NonnegativityViolation, "constant disturbance must be >= 0");
    }
    const auto dim = value.size();
    return {Constant{std::move(value)}, dim};
}

DisturbanceSignal DisturbanceSignal::table(std::vector<double> times, Mat values)
{
    if (times.empty() || static_cast<Eigen::Index>(times.size()) != values.rows()) {
        throw Error(ErrorCode::InvalidArgument, "disturbance table: one row per breakpoint");
    }
    if (times.front() != 0.0 || !std::is_sorted(times.begin(), times.end()) ||
        std::adjacent_find(times.begin(), times.end()) != times.end()) {
        throw Error(ErrorCode::InvalidArgument,
                    "disturbance table: times must start at 0 and increase strictly");
    }
    require_finite(values, "disturbance table");
    if ((values.array() < 0.0).any()) {
        throw Error(ErrorCode::NonnegativityViolation, "disturbance table values must be >= 0");
    }
    const auto dim = values.cols();
    return {Table{std::move(times), std::move(values)}, dim};
}

Vec DisturbanceSignal::operator()(double t) const
{
    return std::visit(
        [&](const auto& k) -> Vec {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Zero>) {
                return Vec::Zero(dim_);
            } else if constexpr (std::is_same_v<K, AbsSine>) {
                return Vec::Constant(dim_, k.amplitude * std::abs(std::sin(k.frequency * t)));
            } else if constexpr (std::is_same_v<K, Constant>) {
                return k.value;
            } else {
                const auto it = std::upper_bound(k.times.begin(), k.times.end(), t);
                const auto row = it == k.times.begin() ? 0 : std::distance(k.times.begin(), it) - 1;
                return k.values.row(row).transpose();
            }
        },
        kind_);
}

bool DisturbanceSignal::is_zero() const
{
    if (std::holds_alternative<Zero>(kind_)) {
        return true;
    }
    if (const auto* s = std::get_if<AbsSine>(&kind_)) {
        return s->amplitude == 0.0;
    }
    if (const auto* c = std::get_if<Constant>(&kind_)) {
        return c->value.isZero(0.0);
    }
    return std::get<Table>(kind_).values.isZero(0.0);
}

bool DisturbanceSignal::is_constant() const
{
    return std::holds_alternative<Zero>(kind_) || std::holds_alternative<Constant>(kind_) ||
           is_zero();
}

bool operator==(const DisturbanceSignal& lhs, const DisturbanceSignal& rhs)
{
    if (lhs.dim_ != rhs.dim_ || lhs.kind_.index() != rhs.kind_.index()) {
        return false;
    }
    return std::visit(
        [&](const auto& a) {
            using K = std::decay_t<decltype(a)>;
            const auto& b = std::get<K>(rhs.kind_);
            if constexpr (std::is_same_v<K, DisturbanceSignal::Zero>) {
                return true;
            } else if constexpr (std::is_same_v<K, DisturbanceSignal::AbsSine>) {
                return a.amplitude == b.amplitude && a.frequency == b.frequency;
            } else if constexpr (std::is_same_v<K, DisturbanceSignal::Constant>) {
                return same_matrix(a.value, b.value);
            } else {
                return a.times == b.times && same_matrix(a.values, b.values);
            }
        },
        lhs.kind_);
}

bool is_metzler(const Mat& a, double tol)
{
    if (a.rows() != a.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "is_metzler: matrix is not square");
    }
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (i != j && a(i, j) < -tol) {
                return false;
            }
        }
    }
    return true;
}

bool is_nonnegative(const Mat& m, double tol)
{
    return m.size() == 0 || m.minCoeff() >= -tol;
}

bool is_positive(const Mat& m, double tol)
{
    return m.size() > 0 && is_nonnegative(m, tol) && m.maxCoeff() > tol;
}

std::vector<double> characteristic_polynomial(const Mat& a)
{
    // Faddeev-LeVerrier.
    const auto n = a.rows();
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    c[static_cast<std::size_t>(n)] = 1.0;
    Mat m = Mat::Zero(n, n);
    const Mat eye = Mat::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        m = a * m + c[static_cast<std::size_t>(n - k + 1)] * eye;
        c[static_cast<std::size_t>(n - k)] = -(a * m).trace() / static_cast<double>(k);
    }
    return c;
}

std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& monic)
{
    if (monic.empty() || monic.back() != 1.0) {
        throw Error(ErrorCode::InvalidArgument, "polynomial_roots expects a monic polynomial");
    }
    const std::size_t degree = monic.size() - 1;
    std::vector<Complex> roots;
    switch (degree) {
    case 0:
        break;
    case 1:
        roots = {Complex(-monic[0], 0.0)};
        break;
    case 2:
        roots = quadratic_roots(monic[1], monic[0]);
        break;
    case 3: {
        const double r = bracket_real_root(monic);
        const auto q = deflate(monic, r);
        roots = quadratic_roots(q[1], q[0]);
        roots.emplace_back(r, 0.0);
        break;
    }
    case 4: {
        // Depress with s = y - a3/4: y^4 + p y^2 + q y + r.
        const double a3 = monic[3];
        const double a2 = monic[2];
        const double a1 = monic[1];
        const double a0 = monic[0];
        const double shift = a3 / 4.0;
        const double p = a2 - 6.0 * shift * shift;
        const double q = a1 - 2.0 * a2 * shift + 8.0 * shift * shift * shift;
        const double r = a0 - a1 * shift + a2 * shift * shift - 3.0 * shift * shift * shift * shift;
        const double scale = 1.0 + std::abs(p) + std::abs(r);
        std::vector<Complex> ys;
        if (std::abs(q) <= 1e-14 * scale) {
            for (const auto z : quadratic_roots_complex(p, r)) {
                const Complex y = std::sqrt(z);
                ys.push_back(y);
                ys.push_back(-y);
            }
        } else {
            const double m = resolvent_root(p, q, r);
            const double s = std::sqrt(2.0 * m);
            const auto first = quadratic_roots(s, p / 2.0 + m - q / (2.0 * s));
            const auto second = quadratic_roots(-s, p / 2.0 + m + q / (2.0 * s));
            ys.insert(ys.end(), first.begin(), first.end());
            ys.insert(ys.end(), second.begin(), second.end());
        }
        for (const auto y : ys) {
            roots.push_back(y - shift);
        }
        break;
    }
    default:
        throw Error(ErrorCode::UnsupportedDimension,
                    "polynomial_roots supports degree <= 4, got " + std::to_string(degree));
    }
    polish(monic, roots);
    return roots;
}

std::vector<std::complex<double>> small_eigenvalues(const Mat& a)
{
    if (a.rows() != a.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "small_eigenvalues: matrix is not square");
    }
    if (a.rows() > 4) {
        throw Error(ErrorCode::UnsupportedDimension,
                    "eigenvalues of nonsymmetric matrices are supported up to 4x4");
    }
    require_finite(a, "small_eigenvalues matrix");
    return polynomial_roots(characteristic_polynomial(a));
}

PatternReport check_pattern(const PatternModel& pattern, double tol)
{
    PatternReport report;
    report.metzler = is_metzler(pattern.A0, tol);
    report.eigenvalues = small_eigenvalues(pattern.A0);
    report.min_real_part = std::numeric_limits<double>::infinity();
    for (const auto& z : report.eigenvalues) {
        report.min_real_part = std::min(report.min_real_part, z.real());
    }
    report.pass = report.metzler && report.min_real_part >= -tol;
    return report;
}

ValidationReport validate_scenario(std::span<const AgentModel> agents, const PatternModel& pattern,
                                   std::span<const Graph> graphs, const ToleranceConfig& tol)
{
    ValidationReport report;
    const auto issue = [&](std::string where, std::string what) {
        report.issues.push_back({std::move(where), std::move(what)});
    };

    const auto n0 = pattern.A0.rows();
    bool pattern_shapes_ok = true;
    if (pattern.A0.rows() != pattern.A0.cols()) {
        issue("pattern.A0", "not square");
        pattern_shapes_ok = false;
    }
    if (pattern.C0.cols() != n0) {
        issue("pattern.C0", "column count differs from A0 dimension");
        pattern_shapes_ok = false;
    }
    if (pattern_shapes_ok) {
        if (!is_nonnegative(pattern.C0, tol.zero_tol)) {
            issue("pattern.C0", "has negative entries");
        }
        try {
            const auto a1 = check_pattern(pattern, tol.zero_tol);
            if (!a1.metzler) {
                issue("pattern.A0", "Assumption 1: A0 is not Metzler");
            }
            if (a1.min_real_part < -tol.zero_tol) {
                issue("pattern.A0", "Assumption 1: eigenvalue with negative real part " +
                                        std::to_string(a1.min_real_part));
            }
        } catch (const Error& e) {
            issue("pattern.A0", std::string("Assumption 1 not checkable: ") + e.what());
        }
    }

    const auto l = pattern.C0.rows();
    const Eigen::Index q = agents.empty() ? 0 : agents.front().D.cols();
    for (std::size_t k = 0; k < agents.size(); ++k) {
        const auto& ag = agents[k];
        const std::string where = "agent[" + (ag.label.empty() ? std::to_string(k + 1) : ag.label) + "]";
        const auto n = ag.A.rows();
        bool shapes_ok = true;
        if (ag.A.cols() != n) {
            issue(where + ".A", "not square");
            shapes_ok = false;
        }
        if (ag.B.rows() != n) {
            issue(where + ".B", "row count differs from A");
            shapes_ok = false;
        }
        if (ag.C.cols() != n) {
            issue(where + ".C", "column count differs from A");
            shapes_ok = false;
        }
        if (ag.C.rows() != l) {
            issue(where + ".C", "output dimension differs from pattern C0");
            shapes_ok = false;
        }
        if (ag.D.rows() != n) {
            issue(where + ".D", "row count differs from A");
            shapes_ok = false;
        }
        if (ag.D.cols() != q) {
            issue(where + ".D", "disturbance dimension differs across agents");
            shapes_ok = false;
        }
        if (!shapes_ok) {
            continue;
        }
        if (!is_metzler(ag.A, tol.zero_tol)) {
            issue(where + ".A", "not Metzler");
        }
        if (!is_nonnegative(ag.B, tol.zero_tol)) {
            issue(where + ".B", "has negative entries");
        }
        if (!is_nonnegative(ag.C, tol.zero_tol)) {
            issue(where + ".C", "has negative entries");
        }
        if (!is_nonnegative(ag.D, tol.zero_tol)) {
            issue(where + ".D", "has negative entries");
        }
    }

    if (graphs.empty()) {
        issue("graphs", "empty graph family");
    }
    for (std::size_t p = 0; p < graphs.size(); ++p) {
        const std::string where = "graph[" + std::to_string(p + 1) + "]";
        if (graphs[p].size() != agents.size()) {
            issue(where, "node count " + std::to_string(graphs[p].size()) + " differs from agent count " +
                             std::to_string(agents.size()));
            continue;
        }
        if (!graphs[p].size() || !is_connected(graphs[p])) {
            issue(where, "Assumption 2: graph is not connected");
        }
    }

    std::sort(report.issues.begin(), report.issues.end());
    return report;
}

}  // namespace poscon
