#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hintcvx/convex_sets.hpp"
#include "hintcvx/error.hpp"

using namespace hintcvx;

namespace {

struct BallFixture {
    GridPtr grid = Grid::radial(41, 1, BoundaryCondition::DirichletZero);
    std::shared_ptr<const H2Metric> metric =
        std::make_shared<H2Metric>(std::make_shared<EllipticOperator>(build_radial_laplacian(grid)));
};

GridFunction random_function(const GridPtr& g, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> n01;
    Eigen::VectorXd v(static_cast<Eigen::Index>(g->size()));
    for (auto& x : v) x = scale * n01(rng);
    g->mask(v);
    return GridFunction(g, v);
}

GridFunction random_cone_member(const GridPtr& g, std::mt19937_64& rng) {
    std::exponential_distribution<double> incr(5.0);
    Eigen::VectorXd d(static_cast<Eigen::Index>(g->size()));
    for (auto& x : d) x = incr(rng);
    return GridFunction(g, from_increments(d));
}

GridFunction values(const GridPtr& g, std::initializer_list<double> v) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double a : v) x[i++] = a;
    return GridFunction(g, x);
}

/// Exhaustive search over nondecreasing nonnegative triples on a 0.01 lattice.
std::array<double, 3> brute_force_isotonic(const std::array<double, 3>& y, const std::array<double, 3>& w) {
    std::array<double, 3> best{};
    double best_cost = std::numeric_limits<double>::infinity();
    const int steps = 400;
    for (int a = 0; a <= steps; ++a)
        for (int b = a; b <= steps; ++b)
            for (int c = b; c <= steps; ++c) {
                const double x[3] = {a * 0.01, b * 0.01, c * 0.01};
                double cost = 0.0;
                for (int i = 0; i < 3; ++i) cost += w[i] * (x[i] - y[i]) * (x[i] - y[i]);
                if (cost < best_cost) {
                    best_cost = cost;
                    best = {x[0], x[1], x[2]};
                }
            }
    return best;
}

}  // namespace

TEST_CASE("membership") {
    BallFixture f;
    const H2Ball ball(1.0, f.metric);
    CHECK(contains(ball, GridFunction(f.grid)));

    const auto s = GridFunction::sample(f.grid, [](double x) { return std::sin(std::numbers::pi * x); });
    const GridFunction edge = ((1.0 + 10.0 * kMembershipTol) / f.metric->norm(s)) * s;
    CHECK_FALSE(contains(ball, edge));
    CHECK(contains(ball, (1.0 / f.metric->norm(s)) * s));

    auto g4 = Grid::radial(4, 1, BoundaryCondition::NeumannZero);
    const MonotoneCone cone(g4);
    CHECK(contains(cone, values(g4, {0, 1, 2, 3})));
    CHECK_FALSE(contains(cone, values(g4, {0, 2, 1, 3})));
    CHECK_FALSE(contains(cone, values(g4, {-1e-6, 0, 1, 2})));
    CHECK_THROWS_AS(MonotoneCone(Grid::square(3)), Error);
}

TEST_CASE("ball projection") {
    BallFixture f;
    std::mt19937_64 rng(1);
    const H2Ball ball(1.0, f.metric);
    const auto s = GridFunction::sample(f.grid, [](double x) { return std::sin(std::numbers::pi * x); });

    const GridFunction inside = (0.5 / f.metric->norm(s)) * s;
    const auto same = project_ball(ball, inside);
    CHECK((same.values().array() == inside.values().array()).all());

    const GridFunction two = (2.0 / f.metric->norm(s)) * s;
    CHECK(l2_norm(project_ball(ball, two) - 0.5 * two) <= 1e-15);

    for (int t = 0; t < 20; ++t) {
        const auto u = random_function(f.grid, rng, 0.1);
        const auto p = project_ball(ball, u);
        CHECK(l2_norm(project_ball(ball, p) - p) <= 1e-12);
        CHECK(contains(ball, p));
    }
}

TEST_CASE("isotonic regression against exhaustive search") {
    const auto pav = isotonic_regression(std::vector<double>{3, 1, 2}, std::vector<double>{1, 1, 1}, 0.0);
    CHECK(pav == std::vector<double>{2, 2, 2});
    CHECK(brute_force_isotonic({3, 1, 2}, {1, 1, 1}) == std::array<double, 3>{2, 2, 2});

    const auto neg = isotonic_regression(std::vector<double>{-1, -2, -3}, std::vector<double>{1, 1, 1}, 0.0);
    CHECK(neg == std::vector<double>{0, 0, 0});

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> y(-1.0, 3.5), w(0.2, 2.0);
    for (int t = 0; t < 5; ++t) {
        const std::array<double, 3> yy{y(rng), y(rng), y(rng)}, ww{w(rng), w(rng), w(rng)};
        const auto got = isotonic_regression(yy, ww, 0.0);
        const auto oracle = brute_force_isotonic(yy, ww);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(got[i] - oracle[i]) <= 0.01);
    }
}

TEST_CASE("cone projection") {
    auto g = Grid::radial(31, 3, BoundaryCondition::NeumannZero);
    const MonotoneCone cone(g);
    std::mt19937_64 rng(4);

    const auto member = random_cone_member(g, rng);
    CHECK(l2_norm(project_cone(cone, member) - member) <= 1e-14);

    for (int t = 0; t < 20; ++t) {
        const auto u = random_function(g, rng);
        const auto p = project_cone(cone, u);
        CHECK(contains(cone, p, 0.0));
        // variational characterisation in the weighted l2 pairing
        for (int s = 0; s < 100; ++s) {
            const auto k = random_cone_member(g, rng);
            CHECK(inner(u - p, k - p) <= 1e-10);
        }
        const auto v = random_function(g, rng);
        CHECK(l2_norm(project_cone(cone, v) - p) <= l2_norm(v - u) + 1e-10);
    }
}

TEST_CASE("ball projection: characterisation and nonexpansiveness in h2") {
    BallFixture f;
    const H2Ball ball(0.5, f.metric);
    std::mt19937_64 rng(8);
    for (int t = 0; t < 20; ++t) {
        const auto u = random_function(f.grid, rng, 0.05);
        const auto p = project_ball(ball, u);
        for (int s = 0; s < 100; ++s) {
            const auto k = project_ball(ball, random_function(f.grid, rng, 0.05));
            CHECK(f.metric->inner(u - p, k - p) <= 1e-10);
        }
        const auto v = random_function(f.grid, rng, 0.05);
        CHECK(f.metric->norm(project_ball(ball, v) - p) <= f.metric->norm(v - u) + 1e-10);
    }
}

TEST_CASE("both sets are convex") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> lam(0.0, 1.0);
    BallFixture f;
    const H2Ball ball(1.0, f.metric);
    auto g = Grid::radial(21, 2, BoundaryCondition::NeumannZero);
    const MonotoneCone cone(g);
    for (int t = 0; t < 50; ++t) {
        const double l = lam(rng);
        const auto a = project_ball(ball, random_function(f.grid, rng)), b = project_ball(ball, random_function(f.grid, rng));
        CHECK(contains(ball, l * a + (1.0 - l) * b));
        const auto c = random_cone_member(g, rng), d = random_cone_member(g, rng);
        CHECK(contains(cone, l * c + (1.0 - l) * d));
    }
}

TEST_CASE("monotonicity report and increment coordinates") {
    auto g = Grid::radial(5, 1, BoundaryCondition::NeumannZero);
    const auto rep = monotonicity_report(values(g, {0.5, 1.0, 0.7, 2.0, 1.9}));
    CHECK(rep.defects == 2);
    CHECK(rep.worst_drop == doctest::Approx(0.3));
    CHECK(rep.min_value == 0.5);
    CHECK(monotonicity_report(values(g, {0, 0, 1, 1, 2})).defects == 0);

    const Eigen::VectorXd u = values(g, {0.5, 1.0, 0.7, 2.0, 1.9}).values();
    CHECK((from_increments(to_increments(u)) - u).norm() <= 1e-15);
}
