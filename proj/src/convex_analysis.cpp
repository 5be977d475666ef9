#include "hintcvx/convex_analysis.hpp"

#include <cmath>

namespace hintcvx {

double fenchel_conjugate_quadratic(const EllipticOperator& A, const GridFunction& ustar, const SolverConfig& cfg) {
    require_same_grid(A.grid(), ustar.grid(), "fenchel_conjugate_quadratic");
    if (!A.positive_definite())
        throw Error(ErrorKind::RankDeficient,
                    "fenchel_conjugate_quadratic: pure Neumann form is rank deficient (conjugate is +inf off the range)");
    Eigen::VectorXd masked = ustar.values();
    A.grid().mask(masked);
    const GridFunction dual(ustar.grid_ptr(), std::move(masked));
    const GridFunction x = linear_solve(A, dual, cfg);
    return std::max(0.0, inner(x, dual) - 0.5 * A.form(x, x));
}

double biconjugate_quadratic(const EllipticOperator& A, const GridFunction& u, const SolverConfig& cfg) {
    const GridFunction y = A.apply(u);
    return inner(u, y) - fenchel_conjugate_quadratic(A, y, cfg);
}

double duality_gap(const EllipticOperator& A, const GridFunction& u, const GridFunction& ustar,
                   const SolverConfig& cfg) {
    require_same_grid(u.grid(), ustar.grid(), "duality_gap");
    return 0.5 * A.form(u, u) + fenchel_conjugate_quadratic(A, ustar, cfg) - inner(u, ustar);
}

double duality_gap(const EllipticOperator& A, const DualPair& pair, const SolverConfig& cfg) {
    return duality_gap(A, pair.u, pair.ustar, cfg);
}

ViResidual vi_residual_from_gradient(const ConvexSet& set, const GridFunction& u, const GridFunction& g,
                                     double box_factor) {
    require_same_grid(u.grid(), g.grid(), "vi_residual");
    ViResidual out{0.0, 0.0, u};
    if (const auto* ball = std::get_if<H2Ball>(&set)) {
        const GridFunction riesz = ball->metric().riesz(g);
        const double nrm = ball->metric().norm(riesz);
        if (nrm > 0.0) out.minimizer = (-ball->radius() / nrm) * riesz;
        out.value = inner(g, u) + ball->radius() * nrm;
        return out;
    }
    // Over the cone ∩ {||v||_inf <= B}: in increment coordinates this is the
    // simplex-like set {e >= 0, sum e <= B}, whose linear minimum sits at
    // B times the indicator of [r_j, 1] with the most negative tail sum.
    const Eigen::VectorXd& w = u.grid().weights();
    const Eigen::VectorXd wg = w.cwiseProduct(g.values());
    const Eigen::Index n = wg.size();
    double tail = 0.0;
    double best = 0.0;
    Eigen::Index best_j = -1;
    for (Eigen::Index j = n - 1; j >= 0; --j) {
        tail += wg[j];
        if (tail < best) {
            best = tail;
            best_j = j;
        }
    }
    out.box_bound = box_factor * max_abs(u);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    if (best_j >= 0) v.tail(n - best_j).setConstant(out.box_bound);
    out.minimizer = GridFunction(u.grid_ptr(), std::move(v));
    out.value = inner(g, u) - out.box_bound * best;
    return out;
}

ViResidual vi_residual(const Problem& problem, const ConvexSet& set, const GridFunction& u, double tol,
                       double box_factor) {
    require_same_grid(problem.grid(), u.grid(), "vi_residual");
    if (!contains(set, u, tol)) throw Error(ErrorKind::Precondition, "vi_residual: u is not in K");
    return vi_residual_from_gradient(set, u, energy_grad(problem, u), box_factor);
}

double equality10_defect(const EllipticOperator& A, const GridFunction& u0, const GridFunction& v0) {
    require_same_grid(A.grid(), u0.grid(), "equality10_defect");
    require_same_grid(A.grid(), v0.grid(), "equality10_defect");
    const GridFunction av0 = A.apply(v0);
    return std::abs(0.5 * A.form(v0, v0) - 0.5 * A.form(u0, u0) - inner(av0, v0 - u0));
}

}  // namespace hintcvx
