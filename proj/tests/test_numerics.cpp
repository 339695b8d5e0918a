#include <catch_amalgamated.hpp>

#include <random>

#include "poscon/error.hpp"
#include "poscon/numerics.hpp"
#include "support/oracles.hpp"

using namespace poscon;
using Catch::Approx;

namespace {

Mat m2(double a, double b, double c, double d)
{
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

Mat random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0)
{
    std::uniform_real_distribution<double> u(-scale, scale);
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) {
            m(i, j) = u(rng);
        }
    }
    return m;
}

}  // namespace

TEST_CASE("solve_linear: identity returns the right-hand side")
{
    Mat b(3, 2);
    b << 1, 2, 3, 4, 5, 6;
    CHECK(solve_linear(Mat::Identity(3, 3), b).isApprox(b, 0.0));
}

TEST_CASE("solve_linear: diagonal and permutation systems")
{
    Mat b(2, 1);
    b << 2, 8;
    const Mat z = solve_linear(m2(2, 0, 0, 4), b);
    CHECK(z(0, 0) == Approx(1.0));
    CHECK(z(1, 0) == Approx(2.0));

    b << 3, 5;
    const Mat p = m2(0, 1, 1, 0);
    const Mat s = solve_linear(p, b);
    CHECK(s(0, 0) == Approx(5.0));
    CHECK(s(1, 0) == Approx(3.0));
    CHECK(max_abs(p * s - b) <= 1e-12);
}

TEST_CASE("solve_linear: errors")
{
    CHECK_THROWS_AS(solve_linear(m2(1, 2, 2, 4), Mat::Ones(2, 1)), Error);
    try {
        solve_linear(m2(1, 2, 2, 4), Mat::Ones(2, 1));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingularMatrix);
    }
    try {
        solve_linear(Mat::Identity(2, 2), Mat::Ones(3, 1));
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
    Mat bad = Mat::Identity(2, 2);
    bad(0, 1) = std::nan("");
    try {
        solve_linear(bad, Mat::Ones(2, 1));
        FAIL("expected NonFinite");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFinite);
    }
}

TEST_CASE("solve_linear: multiply-back on random well-conditioned systems")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<Eigen::Index>(1 + trial % 12);
        Mat a = random_matrix(rng, n, n) + 3.0 * Mat::Identity(n, n);
        const Eigen::JacobiSVD<Mat> svd(a);
        const double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
        if (cond >= 1e6) {
            continue;
        }
        const Mat b = random_matrix(rng, n, 1 + trial % 3, 10.0);
        const Mat z = solve_linear(a, b);
        CHECK(max_abs(a * z - b) <= 1e-8 * (1.0 + max_abs(b)));
    }
}

TEST_CASE("least_squares: rank and null space")
{
    Mat a(2, 3);
    a << 1, 0, 0, 0, 1, 0;
    Mat b(2, 1);
    b << 2, 3;
    const auto ls = least_squares(a, b);
    CHECK(ls.rank == 2);
    CHECK(ls.null_space.cols() == 1);
    CHECK(std::abs(ls.null_space(2, 0)) == Approx(1.0));
    CHECK(ls.solution(2, 0) == Approx(0.0).margin(1e-14));
    CHECK(ls.residual <= 1e-14);
}

TEST_CASE("sym_eigen: spec examples")
{
    const auto id = sym_eigen(Mat::Identity(2, 2));
    CHECK(id.values(0) == Approx(1.0));
    CHECK(id.values(1) == Approx(1.0));

    const auto path = sym_eigen(m2(1, -1, -1, 1));
    CHECK(path.values(0) == Approx(0.0).margin(1e-14));
    CHECK(path.values(1) == Approx(2.0));

    const auto [lo, hi] = oracle::sym2_eigenvalues(-3.9375, 1.0625, -0.9375);
    const auto form = sym_eigen(m2(-3.9375, 1.0625, 1.0625, -0.9375));
    CHECK(form.values(0) == Approx(lo).epsilon(1e-12));
    CHECK(form.values(1) == Approx(hi).epsilon(1e-12));
    CHECK(lo == Approx(-4.2757).epsilon(1e-4));
    CHECK(hi == Approx(-0.5993).epsilon(1e-4));
}

TEST_CASE("sym_eigen: rejects nonsymmetric input")
{
    try {
        sym_eigen(m2(1, 2, 0, 1));
        FAIL("expected NotSymmetric");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotSymmetric);
    }
    // Within tolerance: accepted after symmetrisation.
    CHECK_NOTHROW(sym_eigen(m2(1, 2, 2 + 1e-12, 1)));
}

TEST_CASE("sym_eigen: trace, orthogonality and reconstruction on random matrices")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<Eigen::Index>(1 + trial % 10);
        const Mat r = random_matrix(rng, n, n, 3.0);
        const Mat s = r + r.transpose();
        const auto eig = sym_eigen(s);
        const double scale = 1.0 + max_abs(s);
        CHECK(std::abs(eig.values.sum() - s.trace()) <= 1e-8 * scale);
        CHECK(max_abs(eig.vectors.transpose() * eig.vectors - Mat::Identity(n, n)) <= 1e-8);
        CHECK(max_abs(s * eig.vectors - eig.vectors * eig.values.asDiagonal()) <= 1e-8 * scale);
        for (Eigen::Index k = 1; k < n; ++k) {
            CHECK(eig.values(k - 1) <= eig.values(k));
        }
        const auto jac = oracle::jacobi_eigenvalues(s);
        for (Eigen::Index k = 0; k < n; ++k) {
            CHECK(eig.values(k) == Approx(jac[static_cast<std::size_t>(k)]).margin(1e-9 * scale));
        }
    }
}

TEST_CASE("expm: spec examples")
{
    CHECK(expm(Mat::Zero(3, 3), 7.5).isApprox(Mat::Identity(3, 3)));

    const Mat a0 = m2(0.01, 0.01, 0, 0);
    const Mat e = expm(a0, 10.0);
    const double g = std::exp(0.1);
    CHECK(e(0, 0) == Approx(g).epsilon(1e-12));
    CHECK(e(0, 1) == Approx(g - 1.0).epsilon(1e-12));
    CHECK(e(1, 0) == Approx(0.0).margin(1e-15));
    CHECK(e(1, 1) == Approx(1.0).epsilon(1e-12));
    CHECK(e(0, 0) == Approx(1.10517).epsilon(1e-5));

    const Mat d = expm(m2(-1, 0, 0, -2), 1.0);
    CHECK(d(0, 0) == Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(d(1, 1) == Approx(std::exp(-2.0)).epsilon(1e-12));
    CHECK(d(0, 1) == Approx(0.0).margin(1e-15));
}

TEST_CASE("expm: agrees with a Taylor oracle up to norm 50")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 60; ++trial) {
        const auto n = static_cast<Eigen::Index>(1 + trial % 5);
        Mat a = random_matrix(rng, n, n);
        // Shift to keep the spectrum in the left half plane so the relative
        // comparison is well conditioned at large norms.
        a -= (n + 1.0) * Mat::Identity(n, n);
        const double t = 50.0 / (1.0 + a.norm()) * (trial % 3 == 0 ? 1.0 : 0.3);
        const Mat got = expm(a, t);
        const Mat want = oracle::taylor_expm(a, t);
        CHECK((got - want).norm() <= 1e-9 * want.norm());
    }
}

TEST_CASE("expm: semigroup property")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ut(0.0, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<Eigen::Index>(1 + trial % 6);
        Mat a = random_matrix(rng, n, n);
        a *= 2.0 / std::max(spectral_norm(a), 1e-12) * std::uniform_real_distribution<double>(0, 1)(rng);
        const double s = ut(rng), t = ut(rng);
        const Mat lhs = expm(a, s) * expm(a, t);
        const Mat rhs = expm(a, s + t);
        CHECK((lhs - rhs).norm() <= 1e-7 * rhs.norm());
    }
}

TEST_CASE("expm: overflow is reported")
{
    try {
        expm(Mat::Constant(1, 1, 1000.0), 1.0);
        FAIL("expected Overflow");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Overflow);
    }
}

TEST_CASE("spectral_norm: spec examples and oracle")
{
    CHECK(spectral_norm(Mat::Identity(4, 4)) == Approx(1.0));
    CHECK(spectral_norm(Mat::Zero(3, 2)) == 0.0);
    const Mat a0 = m2(0.01, 0.01, 0, 0);
    const auto ata = oracle::jacobi_eigenvalues(a0.transpose() * a0);
    CHECK(spectral_norm(a0) == Approx(std::sqrt(ata.back())).epsilon(1e-12));
    CHECK(spectral_norm(a0) == Approx(std::sqrt(0.0002)).epsilon(1e-12));
}

TEST_CASE("kron and vec satisfy vec(AXB) = (B^T kron A) vec(X)")
{
    std::mt19937_64 rng(23);
    const Mat a = random_matrix(rng, 3, 2);
    const Mat x = random_matrix(rng, 2, 4);
    const Mat b = random_matrix(rng, 4, 2);
    const Vec lhs = vec(a * x * b);
    const Vec rhs = kron(b.transpose(), a) * vec(x);
    CHECK((lhs - rhs).norm() <= 1e-12);
    CHECK(unvec(vec(x), 2, 4).isApprox(x, 0.0));
}
