#include <catch_amalgamated.hpp>

#include <random>

#include "poscon/error.hpp"
#include "poscon/model.hpp"
#include "poscon/reference_case.hpp"
#include "poscon/sim.hpp"
#include "support/oracles.hpp"
#include "support/random_scenarios.hpp"

using namespace poscon;
using Catch::Approx;

namespace {

Mat m2(double a, double b, double c, double d)
{
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

bool has_issue(const ValidationReport& r, const std::string& location, const std::string& fragment)
{
    for (const auto& i : r.issues) {
        if (i.location == location && i.message.find(fragment) != std::string::npos) {
            return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("is_metzler")
{
    CHECK(is_metzler(Vec::LinSpaced(4, -3, 3).asDiagonal().toDenseMatrix(), 1e-9));
    CHECK(is_metzler(m2(-2, 1, 0, 0), 1e-9));
    CHECK_FALSE(is_metzler(m2(0, -0.5, 0, 0), 1e-9));
    CHECK(is_metzler(m2(0, -1e-12, 0, 0), 1e-9));
    CHECK_THROWS_AS(is_metzler(Mat::Zero(2, 3), 1e-9), Error);
}

TEST_CASE("is_nonnegative and is_positive")
{
    CHECK(is_nonnegative(Mat::Zero(2, 3), 1e-9));
    Mat d1(3, 1);
    d1 << 1, 0, 0;
    CHECK(is_nonnegative(d1, 1e-9));
    Mat neg(1, 2);
    neg << 1, -1;
    CHECK_FALSE(is_nonnegative(neg, 1e-9));

    CHECK_FALSE(is_positive(Mat::Zero(2, 2), 1e-9));
    CHECK(is_positive(d1, 1e-9));
    CHECK_FALSE(is_positive(Mat::Constant(2, 2, 1e-12), 1e-9));
}

TEST_CASE("characteristic polynomial and small eigenvalues")
{
    // det(sI - A) for A = [[1,2],[3,4]] is s^2 - 5 s - 2.
    const auto c = characteristic_polynomial(m2(1, 2, 3, 4));
    REQUIRE(c.size() == 3);
    CHECK(c[0] == Approx(-2.0));
    CHECK(c[1] == Approx(-5.0));
    CHECK(c[2] == 1.0);

    // Rotation generator: +-i.
    const auto rot = small_eigenvalues(m2(0, -1, 1, 0));
    REQUIRE(rot.size() == 2);
    for (const auto& z : rot) {
        CHECK(z.real() == Approx(0.0).margin(1e-12));
        CHECK(std::abs(z.imag()) == Approx(1.0));
    }
    CHECK_THROWS_AS(small_eigenvalues(Mat::Identity(5, 5)), Error);
}

TEST_CASE("small eigenvalues match Eigen's complex solver up to 4x4")
{
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 400; ++trial) {
        const auto n = static_cast<Eigen::Index>(1 + trial % 4);
        Mat a(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                a(i, j) = testgen::uniform(rng, -2, 2);
            }
        }
        auto got = small_eigenvalues(a);
        Eigen::EigenSolver<Mat> es(a);
        std::vector<std::complex<double>> want(es.eigenvalues().data(), es.eigenvalues().data() + n);
        const auto key = [](const std::complex<double>& z) { return std::make_pair(z.real(), z.imag()); };
        std::sort(got.begin(), got.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
        std::sort(want.begin(), want.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
        // Matching by nearest neighbour is robust to near-ties in the sort.
        for (const auto& w : want) {
            double best = 1e300;
            for (const auto& g : got) {
                best = std::min(best, std::abs(g - w));
            }
            CHECK(best <= 1e-6 * (1.0 + std::abs(w)));
        }
    }
}

TEST_CASE("pattern check: spec examples")
{
    PatternModel p{m2(0.01, 0.01, 0, 0), Mat::Ones(1, 2)};
    const auto r = check_pattern(p, 1e-9);
    CHECK(r.pass);
    CHECK(r.metzler);
    REQUIRE(r.eigenvalues.size() == 2);
    std::vector<double> re{r.eigenvalues[0].real(), r.eigenvalues[1].real()};
    std::sort(re.begin(), re.end());
    CHECK(re[0] == Approx(0.0).margin(1e-12));
    CHECK(re[1] == Approx(0.01).epsilon(1e-9));

    CHECK(check_pattern({Mat::Zero(1, 1), Mat::Ones(1, 1)}, 1e-9).pass);
    CHECK_FALSE(check_pattern({Mat::Constant(1, 1, -1.0), Mat::Ones(1, 1)}, 1e-9).pass);
    try {
        check_pattern({Mat::Zero(5, 5), Mat::Ones(1, 5)}, 1e-9);
        FAIL("expected UnsupportedDimension");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnsupportedDimension);
    }
}

TEST_CASE("validate_scenario: reference scenario passes")
{
    const auto s = reference_scenario();
    const auto r = validate_scenario(s.agents, s.pattern, s.graphs, {});
    CHECK(r.ok());
}

TEST_CASE("validate_scenario: flagged defects")
{
    auto s = reference_scenario();

    SECTION("second graph split by removing an edge")
    {
        std::vector<Edge> edges = s.graphs[1].edges();
        edges.erase(std::find(edges.begin(), edges.end(), Edge{3, 4}));  // 4-5 in 1-based numbering
        s.graphs[1] = Graph(8, edges);
        const auto r = validate_scenario(s.agents, s.pattern, s.graphs, {});
        CHECK_FALSE(r.ok());
        CHECK(has_issue(r, "graph[2]", "not connected"));
    }
    SECTION("non-Metzler agent")
    {
        s.agents[2].A = m2(0, -1, 0, 0);
        const auto r = validate_scenario(s.agents, s.pattern, s.graphs, {});
        CHECK(has_issue(r, "agent[3].A", "Metzler"));
    }
    SECTION("negative input matrix and mismatched output dimension")
    {
        s.agents[0].B(2, 0) = -1.0;
        s.agents[4].C = Mat::Ones(2, 2);
        const auto r = validate_scenario(s.agents, s.pattern, s.graphs, {});
        CHECK(has_issue(r, "agent[1].B", "negative"));
        CHECK(has_issue(r, "agent[5].C", ""));
    }
    SECTION("unstable pattern names the pattern condition")
    {
        s.pattern = {Mat::Constant(1, 1, -1.0), Mat::Ones(1, 1)};
        for (auto& a : s.agents) {
            a.C = Mat::Ones(1, a.states());
        }
        const auto r = validate_scenario(s.agents, s.pattern, s.graphs, {});
        CHECK(has_issue(r, "pattern.A0", "Assumption 1"));
    }
}

TEST_CASE("validate_scenario is order independent")
{
    auto s = reference_scenario();
    s.agents[0].A(0, 1) = -1.0;
    s.agents[6].D(0, 0) = -2.0;
    const auto r1 = validate_scenario(s.agents, s.pattern, s.graphs, {});
    std::reverse(s.agents.begin(), s.agents.end());
    const auto r2 = validate_scenario(s.agents, s.pattern, s.graphs, {});
    CHECK(r1.issues == r2.issues);
    CHECK(r1.issues.size() == 2);
}

TEST_CASE("disturbance signals")
{
    const auto z = DisturbanceSignal::zero(2);
    CHECK(z(3.0) == Vec::Zero(2));
    CHECK(z.is_zero());
    CHECK(z.is_constant());

    const auto s = DisturbanceSignal::abs_sine(1, 1.0, 0.01);
    CHECK(s(0.0)(0) == 0.0);
    CHECK(s(100.0)(0) == Approx(std::abs(std::sin(1.0))));
    CHECK(s(500.0)(0) >= 0.0);
    CHECK_FALSE(s.is_constant());

    Mat values(2, 1);
    values << 1.0, 2.0;
    const auto t = DisturbanceSignal::table({0.0, 5.0}, values);
    CHECK(t(4.99)(0) == 1.0);
    CHECK(t(5.0)(0) == 2.0);
    CHECK(t(50.0)(0) == 2.0);

    try {
        DisturbanceSignal::constant(Vec::Constant(1, -1.0));
        FAIL("expected NonnegativityViolation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonnegativityViolation);
    }
    CHECK(DisturbanceSignal::abs_sine(1, 1.0, 0.01) == s);
    CHECK_FALSE(DisturbanceSignal::abs_sine(1, 1.0, 0.02) == s);
}

TEST_CASE("tolerance config validation")
{
    CHECK_NOTHROW(ToleranceConfig{}.validate());
    ToleranceConfig bad;
    bad.definiteness_margin = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("open-loop Metzler agents stay nonnegative under nonnegative inputs")
{
    // Random perturbed plants driven by a nonnegative disturbance from
    // nonnegative states.
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const auto a = testgen::perturbed_agent(rng, trial % 3, "a");
        REQUIRE(is_metzler(a.A, 1e-12));
        Vec x(a.states());
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            x(k) = testgen::uniform(rng, 0, 3);
        }
        std::vector<double> times;
        for (int k = 0; k <= 2000; ++k) {
            times.push_back(0.01 * k);
        }
        const auto traj = oracle::rk4(
            [&](double t, const Vec& v) { return Vec(a.A * v + a.D * std::abs(std::sin(t))); }, x, times);
        double lowest = 1e300;
        for (const auto& v : traj) {
            lowest = std::min(lowest, v.minCoeff());
        }
        CHECK(lowest >= -1e-8);
    }
}
