#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "hintcvx/functionals.hpp"

namespace hintcvx {

inline constexpr double kMembershipTol = 1e-9;

/// K(r) = { u : ||u||_h2 <= r }; the zero boundary data is structural.
class H2Ball {
public:
    H2Ball(double r, std::shared_ptr<const H2Metric> metric);

    double radius() const { return r_; }
    const H2Metric& metric() const { return *metric_; }
    const Grid& grid() const { return metric_->grid(); }

private:
    double r_;
    std::shared_ptr<const H2Metric> metric_;
};

/// { u : u >= 0, u(r_i) <= u(r_j) for i <= j } on a radial grid.
class MonotoneCone {
public:
    explicit MonotoneCone(GridPtr grid);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }

private:
    GridPtr grid_;
};

using ConvexSet = std::variant<H2Ball, MonotoneCone>;

const Grid& set_grid(const ConvexSet& set);

bool contains(const H2Ball& ball, const GridFunction& u, double tol = kMembershipTol);
bool contains(const MonotoneCone& cone, const GridFunction& u, double tol = kMembershipTol);
bool contains(const ConvexSet& set, const GridFunction& u, double tol = kMembershipTol);

/// Metric projection in the h2 inner product: radial rescaling.
GridFunction project_ball(const H2Ball& ball, const GridFunction& u);
/// Metric projection in the weighted L2 inner product.
GridFunction project_cone(const MonotoneCone& cone, const GridFunction& u);
GridFunction project(const ConvexSet& set, const GridFunction& u);

/// Weighted least-squares nondecreasing fit bounded below by `lower`
/// (pool-adjacent-violators).
std::vector<double> isotonic_regression(std::span<const double> y, std::span<const double> w,
                                        double lower = -std::numeric_limits<double>::infinity());

struct MonotonicityReport {
    std::size_t defects = 0;  // nodes j with max_{i<=j} u_i - u_j > tol
    double worst_drop = 0.0;
    double min_value = 0.0;
};

MonotonicityReport monotonicity_report(const GridFunction& u, double tol = kMembershipTol);

/// Increment coordinates of the cone: u_i = d_0 + ... + d_i, so u is in the
/// cone iff every d_i >= 0.
Eigen::VectorXd to_increments(const Eigen::VectorXd& u);
Eigen::VectorXd from_increments(const Eigen::VectorXd& d);

}  // namespace hintcvx
