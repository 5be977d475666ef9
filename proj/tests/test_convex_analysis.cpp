#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "hintcvx/convex_analysis.hpp"
#include "hintcvx/error.hpp"

using namespace hintcvx;

namespace {

GridFunction random_function(const GridPtr& g, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> n01;
    Eigen::VectorXd v(static_cast<Eigen::Index>(g->size()));
    for (auto& x : v) x = scale * n01(rng);
    g->mask(v);
    return GridFunction(g, v);
}

/// ½<A^{-1}d, d> through a dense solve on the free nodes.
double dense_half_inverse_form(const EllipticOperator& A, const GridFunction& d) {
    const Grid& g = A.grid();
    std::vector<Eigen::Index> free;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!g.is_fixed(i)) free.push_back(static_cast<Eigen::Index>(i));
    const Eigen::MatrixXd S = Eigen::MatrixXd(A.stiffness())(free, free);
    const Eigen::VectorXd wd = g.weights().cwiseProduct(d.values())(free);
    return 0.5 * wd.dot(S.ldlt().solve(wd));
}

ProblemSpec concave_convex(std::size_t n, double mu) {
    ProblemSpec s;
    s.family = Family::ConcaveConvex;
    s.grid = Grid::radial(n, 1, BoundaryCondition::DirichletZero);
    s.mu = mu;
    return s;
}

ProblemSpec neumann_radial(std::size_t n) {
    ProblemSpec s;
    s.family = Family::NeumannRadial;
    s.grid = Grid::radial(n, 3, BoundaryCondition::NeumannZero);
    s.weight = GridFunction::sample(s.grid, [](double r) { return 1.0 + r; });
    return s;
}

}  // namespace

TEST_CASE("conjugate of the quadratic form") {
    std::mt19937_64 rng(2);
    auto g = Grid::radial(41, 1, BoundaryCondition::DirichletZero);
    const auto A = build_radial_laplacian(g);
    CHECK(fenchel_conjugate_quadratic(A, GridFunction(g)) == 0.0);

    for (int t = 0; t < 10; ++t) {
        const auto u = random_function(g, rng);
        const auto ustar = A.apply(u);
        const double value = fenchel_conjugate_quadratic(A, ustar);
        CHECK(std::abs(value - 0.5 * A.form(u, u)) <= 1e-9 * (1.0 + value));
        CHECK(std::abs(fenchel_conjugate_quadratic(A, 2.0 * ustar) - 4.0 * value) <= 1e-9 * (1.0 + value));
        CHECK(std::abs(value - dense_half_inverse_form(A, ustar)) <= 1e-9 * (1.0 + value));
        // the supremum defining the conjugate never exceeds the returned value
        for (int s = 0; s < 50; ++s) {
            const auto x = u + random_function(g, rng, 0.1);
            CHECK(inner(x, ustar) - 0.5 * A.form(x, x) <= value + 1e-9 * (1.0 + value));
        }
    }
}

TEST_CASE("conjugate rejects the rank-deficient neumann form") {
    auto g = Grid::radial(11, 3, BoundaryCondition::NeumannZero);
    const auto A = build_radial_laplacian(g);
    try {
        fenchel_conjugate_quadratic(A, GridFunction::sample(g, [](double r) { return r; }));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::RankDeficient);
    }
}

TEST_CASE("duality gap") {
    std::mt19937_64 rng(6);
    auto g = Grid::radial(61, 3, BoundaryCondition::NeumannZero);
    const auto A = build_radial_laplacian(g, OperatorKind::NegLaplacianPlusIdentity);
    CHECK(duality_gap(A, GridFunction(g), GridFunction(g)) == 0.0);
    for (int t = 0; t < 10; ++t) {
        const auto u = random_function(g, rng);
        CHECK(std::abs(duality_gap(A, DualPair{u, A.apply(u)})) <= 1e-8);
        CHECK(duality_gap(A, u, random_function(g, rng)) >= -1e-9);

        const auto delta = random_function(g, rng);
        const auto unit = (1.0 / l2_norm(delta)) * delta;
        const double gap1 = duality_gap(A, u, A.apply(u) + unit);
        const double gap_small = duality_gap(A, u, A.apply(u) + 1e-2 * unit);
        CHECK(gap1 > 0.0);
        CHECK(std::abs(gap1 - dense_half_inverse_form(A, unit)) <= 1e-9);
        CHECK(gap_small == doctest::Approx(1e-4 * gap1).epsilon(1e-4));
    }
}

TEST_CASE("biconjugate returns the quadratic form") {
    std::mt19937_64 rng(7);
    auto g = Grid::square(6);
    const auto A = build_2d_laplacian(g);
    for (int t = 0; t < 10; ++t) {
        const auto u = random_function(g, rng);
        CHECK(std::abs(biconjugate_quadratic(A, u) - 0.5 * A.form(u, u)) <= 1e-8);
    }
}

TEST_CASE("equality defect is half the energy distance") {
    std::mt19937_64 rng(8);
    auto g = Grid::radial(51, 1, BoundaryCondition::DirichletZero);
    const auto A = build_radial_laplacian(g);
    const auto u = random_function(g, rng);
    CHECK(equality10_defect(A, u, u) == doctest::Approx(0.0).epsilon(1e-12));
    for (int t = 0; t < 20; ++t) {
        const auto u0 = random_function(g, rng), v0 = random_function(g, rng);
        const auto d = v0 - u0;
        CHECK(std::abs(equality10_defect(A, u0, v0) - 0.5 * A.form(d, d)) <= 1e-10 * (1.0 + A.form(d, d)));
    }
}

TEST_CASE("VI residual over the ball") {
    const Problem pr(concave_convex(41, 0.0));
    const H2Ball ball(0.5, pr.h2_metric());
    const H2Metric& m = *pr.h2_metric();
    CHECK(vi_residual(pr, ball, GridFunction(pr.grid_ptr())).value == 0.0);

    SUBCASE("outward normal gradient on the boundary gives zero") {
        const auto s = GridFunction::sample(pr.grid_ptr(), [](double x) { return std::sin(std::numbers::pi * x); });
        const auto u = (0.5 / m.norm(s)) * s;
        // g with Riesz representative -2u: g_i = -2 <u, e_i>_h2 / w_i
        Eigen::VectorXd gv = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(u.size()));
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (pr.grid().is_fixed(i)) continue;
            Eigen::VectorXd e = Eigen::VectorXd::Zero(gv.size());
            e[static_cast<Eigen::Index>(i)] = 1.0;
            gv[static_cast<Eigen::Index>(i)] =
                -2.0 * m.inner(u, GridFunction(pr.grid_ptr(), e)) / pr.grid().weights()[static_cast<Eigen::Index>(i)];
        }
        const auto res = vi_residual_from_gradient(ball, u, GridFunction(pr.grid_ptr(), gv));
        CHECK(std::abs(res.value) <= 1e-10);
        CHECK(l2_norm(res.minimizer - u) <= 1e-8);
    }
    SUBCASE("interior points: residual bounds the Riesz norm") {
        std::mt19937_64 rng(31);
        for (int t = 0; t < 20; ++t) {
            const auto u = project_ball(H2Ball(0.4, pr.h2_metric()), random_function(pr.grid_ptr(), rng, 0.01));
            const auto g = random_function(pr.grid_ptr(), rng);
            const auto res = vi_residual_from_gradient(ball, u, g);
            const double G = m.norm(m.riesz(g));
            CHECK(res.value >= (0.5 - m.norm(u)) * G - 1e-12);
            CHECK(res.value >= 0.0);
            CHECK(inner(g, res.minimizer - u) == doctest::Approx(-res.value).epsilon(1e-10));
        }
    }
    SUBCASE("points outside K are rejected") {
        const auto s = GridFunction::sample(pr.grid_ptr(), [](double x) { return std::sin(std::numbers::pi * x); });
        try {
            vi_residual(pr, ball, (1.0 / m.norm(s)) * s);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Precondition);
        }
    }
}

TEST_CASE("VI residual over the cone is the exact box-restricted minimum") {
    const Problem pr(neumann_radial(31));
    const MonotoneCone cone(pr.grid_ptr());
    std::mt19937_64 rng(5);
    std::exponential_distribution<double> incr(3.0);
    std::uniform_int_distribution<int> jump(0, 30);
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd d(31);
        for (auto& x : d) x = incr(rng);
        const GridFunction u(pr.grid_ptr(), from_increments(d));
        const auto g = random_function(pr.grid_ptr(), rng);
        const auto res = vi_residual_from_gradient(cone, u, g, 10.0);
        CHECK(res.box_bound == doctest::Approx(10.0 * max_abs(u)));
        CHECK(contains(cone, res.minimizer));
        CHECK(max_abs(res.minimizer) <= res.box_bound * (1.0 + 1e-15));
        CHECK(inner(g, res.minimizer - u) == doctest::Approx(-res.value).epsilon(1e-10));
        // extreme points of the boxed cone are B times step functions and 0
        for (int s = 0; s < 50; ++s) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(31);
            v.tail(31 - jump(rng)).setConstant(res.box_bound);
            CHECK(inner(g, GridFunction(pr.grid_ptr(), v) - u) >= -res.value - 1e-10);
        }
        CHECK(inner(g, GridFunction(pr.grid_ptr()) - u) >= -res.value - 1e-10);
    }
}
