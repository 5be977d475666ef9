#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hintcvx/error.hpp"
#include "hintcvx/principle.hpp"
#include "support/oracles.hpp"

using namespace hintcvx;

namespace {

double g_of(double C1, double mu, double p, double q, double r) {
    return C1 * std::pow(r, p - 1.0) + C1 * mu * std::pow(r, q - 1.0) - r;
}

/// Window endpoints by bisection on the sign of g, bracketed at
/// {1e-8, argmin} and {argmin, 10}; argmin of g/r by golden section in log r.
std::pair<double, double> window_oracle(double C1, double mu, double p, double q) {
    auto ratio = [&](double lr) { return g_of(C1, mu, p, q, std::exp(lr)) / std::exp(lr); };
    double a = std::log(1e-8), b = std::log(10.0);
    for (int i = 0; i < 300; ++i) {
        const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
        (ratio(m1) < ratio(m2) ? b : a) = (ratio(m1) < ratio(m2) ? m2 : m1);
    }
    const double rm = std::exp(0.5 * (a + b));
    auto root = [&](double neg, double pos) {
        for (int i = 0; i < 300; ++i) {
            const double mid = 0.5 * (neg + pos);
            (g_of(C1, mu, p, q, mid) <= 0.0 ? neg : pos) = mid;
        }
        return neg;
    };
    return {root(rm, 1e-8), root(rm, 10.0)};
}

ProblemSpec concave_convex(std::size_t n, double mu, double p = 4.0, double q = 1.5) {
    ProblemSpec s;
    s.family = Family::ConcaveConvex;
    s.grid = Grid::radial(n, 1, BoundaryCondition::DirichletZero);
    s.p = p;
    s.q = q;
    s.mu = mu;
    return s;
}

ProblemSpec nonhomogeneous(std::size_t n, double norm_f) {
    ProblemSpec s;
    s.family = Family::Nonhomogeneous;
    s.grid = Grid::radial(n, 1, BoundaryCondition::DirichletZero);
    s.forcing = GridFunction::sample(s.grid, [](double x) { return std::sin(std::numbers::pi * x); });
    s.forcing = (norm_f / l2_norm(*s.forcing)) * *s.forcing;
    return s;
}

ProblemSpec neumann_radial(std::size_t n) {
    ProblemSpec s;
    s.family = Family::NeumannRadial;
    s.grid = Grid::radial(n, 3, BoundaryCondition::NeumannZero);
    s.weight = GridFunction::sample(s.grid, [](double r) { return 1.0 + r; });
    return s;
}

void check_theorem_logic(const Certificate& c, const Tolerances& tol) {
    if (c.verdict != Verdict::Certified) return;
    CHECK(c.vi_residual <= tol.vi);
    CHECK(c.v0_in_K);
    CHECK(c.strong_residual <= tol.strong);
    CHECK(c.u0_v0_energy_distance <= 1e-5);
    CHECK(std::abs(c.eq10_defect - 0.5 * c.u0_v0_energy_distance * c.u0_v0_energy_distance) <= 1e-10);
}

}  // namespace

TEST_CASE("radius window: closed form for mu = 0") {
    const auto w = radius_window(1.0, 0.0, 3.0, 1.5);
    REQUIRE(w);
    CHECK(w->r1 == 0.0);
    CHECK(std::abs(w->r2 - 1.0) <= 1e-9);
}

TEST_CASE("radius window: pinned endpoints for (1, 0.1, 3, 1.5)") {
    const auto w = radius_window(1.0, 0.1, 3.0, 1.5);
    REQUIRE(w);
    const auto [r1, r2] = window_oracle(1.0, 0.1, 3.0, 1.5);
    CHECK(std::abs(w->r1 - r1) <= 1e-10);
    CHECK(std::abs(w->r2 - r2) <= 1e-10);
    // frozen oracle values
    CHECK(std::abs(w->r1 - 0.010207315069) <= 1e-10);
    CHECK(std::abs(w->r2 - 0.894252549272) <= 1e-10);
}

TEST_CASE("radius window: parameter ranges") {
    CHECK_THROWS_AS(radius_window(0.0, 0.1, 3.0, 1.5), Error);
    CHECK_THROWS_AS(radius_window(1.0, -0.1, 3.0, 1.5), Error);
    CHECK_THROWS_AS(radius_window(1.0, 0.1, 2.0, 1.5), Error);
    CHECK_THROWS_AS(radius_window(1.0, 0.1, 3.0, 2.5), Error);
    CHECK_THROWS_AS(mu_star(1.0, 3.0, 1.0), Error);
}

TEST_CASE("mu*: hand calculus for (1, 3, 1.5)") {
    // maximise r^{1/2} - r^{3/2}: derivative zero at r = 1/3
    const auto m = mu_star(1.0, 3.0, 1.5);
    CHECK(std::abs(m.argmax - 1.0 / 3.0) <= 1e-6);
    CHECK(std::abs(m.value - (2.0 / 3.0) / std::sqrt(3.0)) <= 1e-10);
    CHECK_FALSE(m.degenerate);
}

TEST_CASE("mu*: closed-form maximiser and monotonicity in C1") {
    // argmax of (r^{2-q} - C1 r^{p-q}) / C1 is ((2-q) / (C1 (p-q)))^{1/(p-2)}
    double prev = std::numeric_limits<double>::infinity();
    for (double C1 : {0.5, 1.0, 2.0, 5.0, 20.0}) {
        const double p = 4.0, q = 1.5;
        const double r = std::pow((2.0 - q) / (C1 * (p - q)), 1.0 / (p - 2.0));
        const double closed = (std::pow(r, 2.0 - q) - C1 * std::pow(r, p - q)) / C1;
        const auto m = mu_star(C1, p, q);
        CHECK(std::abs(m.value - closed) <= 1e-10 * closed);
        CHECK(m.value < prev);
        prev = m.value;
    }
}

TEST_CASE("window and mu* consistency on seeded tuples") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> C(0.2, 5.0), P(2.2, 6.0), Q(1.05, 1.95), F(0.01, 0.98), U(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const double C1 = C(rng), p = P(rng), q = Q(rng);
        const double ms = mu_star(C1, p, q).value;
        CHECK(radius_window(C1, 0.99 * ms, p, q).has_value());
        CHECK_FALSE(radius_window(C1, 1.01 * ms, p, q).has_value());

        const double mu = F(rng) * ms;
        const auto w = radius_window(C1, mu, p, q);
        REQUIRE(w);
        for (int s = 0; s < 10; ++s) {
            const double r = w->r1 + U(rng) * (w->r2 - w->r1);
            CHECK(g_of(C1, mu, p, q, r) <= 1e-12 * r);
        }
        CHECK(g_of(C1, mu, p, q, 1.01 * w->r2) > 0.0);
        if (w->r1 > 1e-8) CHECK(g_of(C1, mu, p, q, 0.99 * w->r1) > 0.0);
    }
}

TEST_CASE("forcing window and default radius") {
    const auto w = forcing_radius_window(1.0, 3.0, 0.0);
    REQUIRE(w);
    CHECK(w->r1 == 0.0);
    CHECK(std::abs(w->r2 - 1.0) <= 1e-9);
    CHECK(default_radius(*w) == doctest::Approx(0.5 * w->r2));
    CHECK(default_radius({0.01, 0.81}) == doctest::Approx(0.09));
    // r^2 + F <= r is empty once F > 1/4
    CHECK(forcing_radius_window(1.0, 3.0, 0.24).has_value());
    CHECK_FALSE(forcing_radius_window(1.0, 3.0, 0.26).has_value());
}

TEST_CASE("step (ii) verification") {
    RunOptions opt;
    SUBCASE("zero input") {
        const Problem pr(nonhomogeneous(51, 0.0));
        const H2Ball ball(0.5, pr.h2_metric());
        const auto res = step_ii_verify(pr, ball, GridFunction(pr.grid_ptr()), opt);
        CHECK(max_abs(res.v0) == 0.0);
        CHECK(res.in_K);
    }
    SUBCASE("large nonlinearity with a tiny ball leaves K") {
        const Problem pr(concave_convex(51, 0.1));
        const H2Ball ball(1e-3, pr.h2_metric());
        const auto big = GridFunction::sample(pr.grid_ptr(), [](double x) { return 50.0 * std::sin(std::numbers::pi * x); });
        const auto res = step_ii_verify(pr, ball, big, opt);
        CHECK_FALSE(res.in_K);
        CHECK(res.v0_norms.h2 > 1e-3);
        CHECK(res.chain_lhs == res.v0_norms.h2);
    }
}

TEST_CASE("pipeline: concave-convex is certified with negative energy") {
    auto spec = concave_convex(201, 0.0);
    spec.mu = 0.5 * mu_star(1.0, 4.0, 1.5).value;
    RunOptions opt;
    const auto run = run_problem(spec, opt);
    const auto& c = run.certificate;
    CHECK(c.verdict == Verdict::Certified);
    CHECK(c.energy < 0.0);
    REQUIRE(c.u0);
    CHECK(l2_norm(*c.u0) > 1e-4);
    CHECK(oracle::strong_residual(spec, *c.u0) <= 1e-6);
    CHECK(c.window.has_value());
    CHECK(*c.radius == doctest::Approx(std::sqrt(c.window->r1 * c.window->r2)));
    check_theorem_logic(c, opt.tol);
}

TEST_CASE("pipeline: trivial problem certifies u0 = 0") {
    auto spec = concave_convex(51, 0.0);
    const auto run = run_problem(spec, {});
    CHECK(run.certificate.verdict == Verdict::Certified);
    CHECK(max_abs(*run.certificate.u0) <= 1e-10);
    CHECK(std::abs(run.certificate.energy) <= 1e-20);
}

TEST_CASE("pipeline: neumann-radial gives a positive increasing solution") {
    const auto spec = neumann_radial(201);
    RunOptions opt;
    const auto run = run_problem(spec, opt);
    const auto& c = run.certificate;
    CHECK(c.verdict == Verdict::Certified);
    CHECK(*c.mountain_pass_level > 0.0);
    CHECK(*c.min_u0 >= -1e-9);
    CHECK(*c.monotonicity_defects == 0);
    CHECK(oracle::strong_residual(spec, *c.u0) <= 1e-6);
    check_theorem_logic(c, opt.tol);
}

TEST_CASE("pipeline: empty window and forced radius") {
    auto spec = concave_convex(51, 0.0);
    spec.mu = 1.5 * mu_star(1.0, 4.0, 1.5).value;
    const auto empty = run_problem(spec, {});
    CHECK(empty.certificate.verdict == Verdict::StepIIFailed);
    CHECK_FALSE(empty.certificate.window.has_value());
    CHECK(empty.certificate.reason.find("window") != std::string::npos);

    // large forcing on a small fixed ball: step (i) succeeds on the boundary, v0 leaves K
    auto forced = nonhomogeneous(101, 2.0);
    forced.radius = 0.05;
    const auto run = run_problem(forced, {});
    CHECK(run.certificate.vi_residual <= 1e-9);
    CHECK_FALSE(run.certificate.v0_in_K);
    CHECK(run.certificate.verdict == Verdict::StepIIFailed);
}

TEST_CASE("pipeline: certified runs satisfy the theorem logic across families") {
    RunOptions opt;
    for (double nf : {0.0, 0.01, 0.1}) {
        const auto c = run_problem(nonhomogeneous(101, nf), opt).certificate;
        CHECK(c.verdict == Verdict::Certified);
        check_theorem_logic(c, opt.tol);
    }
    for (double frac : {0.1, 0.5, 0.9}) {
        auto spec = concave_convex(101, 0.0, 3.0, 1.5);
        spec.mu = frac * mu_star(1.0, 3.0, 1.5).value;
        const auto c = run_problem(spec, opt).certificate;
        CHECK(c.verdict == Verdict::Certified);
        check_theorem_logic(c, opt.tol);
    }
}

TEST_CASE("forcing threshold probe") {
    const auto spec = nonhomogeneous(101, 0.0);
    const auto dir = *nonhomogeneous(101, 1.0).forcing;
    RunOptions opt;
    const auto probe = forcing_threshold_probe(spec, dir, 0.3, opt);
    CHECK(probe.evaluations.front().s == 0.0);
    CHECK(probe.evaluations.front().certified);
    CHECK(probe.lambda_hat > 0.0);
    CHECK(probe.certified_at_lambda);
    CHECK_FALSE(probe.certified_at_double);
    CHECK_FALSE(probe.non_monotone);

    double prev = 0.0;
    for (double r : {0.1, 0.2, 0.4}) {
        const double s = forcing_threshold_probe(spec, dir, r, opt).lambda_hat;
        CHECK(s > prev);
        prev = s;
    }
    CHECK_THROWS_AS(forcing_threshold_probe(concave_convex(51, 0.1), dir, 0.3, opt), Error);
}

TEST_CASE("pipeline: C1 controls whether step (ii) can succeed") {
    RunOptions opt;
    auto spec = concave_convex(201, 0.0);
    spec.C1 = 0.2;
    spec.mu = 0.5 * mu_star(spec.C1, spec.p, spec.q).value;
    const auto ok = run_problem(spec, opt).certificate;
    CHECK(ok.verdict == Verdict::Certified);
    CHECK(ok.energy < -1e-3);
    check_theorem_logic(ok, opt.tol);

    // far below the discrete regularity constant the window is too wide
    spec.C1 = 0.02;
    spec.mu = 0.5 * mu_star(spec.C1, spec.p, spec.q).value;
    const auto bad = run_problem(spec, opt).certificate;
    CHECK(bad.vi_residual <= opt.tol.vi);
    CHECK_FALSE(bad.v0_in_K);
    CHECK(bad.verdict == Verdict::StepIIFailed);
    CHECK(bad.v0_h2_norm > *bad.radius);
}
