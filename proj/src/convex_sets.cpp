#include "hintcvx/convex_sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hintcvx/error.hpp"

namespace hintcvx {

H2Ball::H2Ball(double r, std::shared_ptr<const H2Metric> metric) : r_(r), metric_(std::move(metric)) {
    if (!(r_ > 0.0) || !std::isfinite(r_)) throw Error(ErrorKind::InvalidArgument, "r: ball radius must be positive");
    if (!metric_) throw Error(ErrorKind::InvalidArgument, "H2Ball needs a metric");
}

MonotoneCone::MonotoneCone(GridPtr grid) : grid_(std::move(grid)) {
    if (!grid_ || !grid_->is_radial())
        throw Error(ErrorKind::InvalidArgument, "monotone cone lives on a radial grid");
}

const Grid& set_grid(const ConvexSet& set) {
    return std::visit([](const auto& k) -> const Grid& { return k.grid(); }, set);
}

bool contains(const H2Ball& ball, const GridFunction& u, double tol) {
    require_same_grid(ball.grid(), u.grid(), "contains(H2Ball)");
    return ball.metric().norm(u) <= ball.radius() + tol;
}

bool contains(const MonotoneCone& cone, const GridFunction& u, double tol) {
    require_same_grid(cone.grid(), u.grid(), "contains(MonotoneCone)");
    const auto report = monotonicity_report(u, tol);
    return report.defects == 0 && report.min_value >= -tol;
}

bool contains(const ConvexSet& set, const GridFunction& u, double tol) {
    return std::visit([&](const auto& k) { return contains(k, u, tol); }, set);
}

GridFunction project_ball(const H2Ball& ball, const GridFunction& u) {
    require_same_grid(ball.grid(), u.grid(), "project_ball");
    const double nrm = ball.metric().norm(u);
    if (nrm <= ball.radius()) return u;
    if (!(nrm > 0.0)) throw Error(ErrorKind::Internal, "project_ball: zero norm outside the ball");
    return (ball.radius() / nrm) * u;
}

std::vector<double> isotonic_regression(std::span<const double> y, std::span<const double> w, double lower) {
    if (y.size() != w.size()) throw Error(ErrorKind::InvalidArgument, "isotonic_regression: size mismatch");
    struct Block {
        double mean;
        double weight;
        std::size_t count;
    };
    std::vector<Block> blocks;
    blocks.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        blocks.push_back({y[i], w[i], 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
            Block top = blocks.back();
            blocks.pop_back();
            Block& prev = blocks.back();
            const double total = prev.weight + top.weight;
            prev.mean = total > 0.0 ? (prev.mean * prev.weight + top.mean * top.weight) / total
                                    : 0.5 * (prev.mean + top.mean);
            prev.weight = total;
            prev.count += top.count;
        }
    }
    // Clamping the unconstrained isotonic fit at the bound gives the bounded fit.
    std::vector<double> out;
    out.reserve(y.size());
    for (const auto& b : blocks) out.insert(out.end(), b.count, std::max(b.mean, lower));
    return out;
}

GridFunction project_cone(const MonotoneCone& cone, const GridFunction& u) {
    require_same_grid(cone.grid(), u.grid(), "project_cone");
    if (contains(cone, u, 0.0)) return u;
    const auto& y = u.values();
    const auto& w = cone.grid().weights();
    auto fit = isotonic_regression(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())),
                                   std::span<const double>(w.data(), static_cast<std::size_t>(w.size())), 0.0);
    return GridFunction(u.grid_ptr(), Eigen::Map<const Eigen::VectorXd>(fit.data(), y.size()));
}

GridFunction project(const ConvexSet& set, const GridFunction& u) {
    if (const auto* ball = std::get_if<H2Ball>(&set)) return project_ball(*ball, u);
    return project_cone(std::get<MonotoneCone>(set), u);
}

MonotonicityReport monotonicity_report(const GridFunction& u, double tol) {
    MonotonicityReport rep;
    const auto& x = u.values();
    if (x.size() == 0) return rep;
    double running = x[0];
    rep.min_value = x.minCoeff();
    for (Eigen::Index j = 1; j < x.size(); ++j) {
        const double drop = running - x[j];
        rep.worst_drop = std::max(rep.worst_drop, drop);
        if (drop > tol) ++rep.defects;
        running = std::max(running, x[j]);
    }
    return rep;
}

Eigen::VectorXd to_increments(const Eigen::VectorXd& u) {
    Eigen::VectorXd d(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) d[i] = i == 0 ? u[0] : u[i] - u[i - 1];
    return d;
}

Eigen::VectorXd from_increments(const Eigen::VectorXd& d) {
    Eigen::VectorXd u(d.size());
    double acc = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) u[i] = acc += d[i];
    return u;
}

}  // namespace hintcvx
