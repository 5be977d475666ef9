#pragma once

#include "hintcvx/convex_sets.hpp"
#include "hintcvx/solvers.hpp"

namespace hintcvx {

/// Primal element and a dual element identified through the weighted pairing.
struct DualPair {
    GridFunction u;
    GridFunction ustar;

    double pairing() const { return inner(u, ustar); }
};

/// Ψ*(u*) for Ψ(u) = ½<Au, u>, i.e. ½<A^{-1}u*, u*>. Evaluated as
/// <x, u*> - Ψ(x) at the CG solution x of Ax = u*, so the solve error only
/// enters quadratically. Throws RankDeficient for the pure Neumann Laplacian.
double fenchel_conjugate_quadratic(const EllipticOperator& A, const GridFunction& ustar,
                                   const SolverConfig& cfg = {});

/// Ψ**(u) = sup_{u*} <u, u*> - Ψ*(u*), evaluated at the maximiser u* = Au.
double biconjugate_quadratic(const EllipticOperator& A, const GridFunction& u, const SolverConfig& cfg = {});

/// Ψ(u) + Ψ*(u*) - <u, u*>; nonnegative, zero iff u* = Au.
double duality_gap(const EllipticOperator& A, const DualPair& pair, const SolverConfig& cfg = {});
double duality_gap(const EllipticOperator& A, const GridFunction& u, const GridFunction& ustar,
                   const SolverConfig& cfg = {});

struct ViResidual {
    double value = 0.0;
    /// Box bound B used for the cone (||v||_inf <= B); zero for the ball.
    double box_bound = 0.0;
    /// Minimiser v of <g, v - u> over K (or over K ∩ box).
    GridFunction minimizer;
};

/// rho(u) = -inf_{v in K} <DΨ(u) - DΦ(u), v - u>. rho <= tol certifies u as a
/// discrete critical point of Ψ_K - Φ. Requires u in K.
ViResidual vi_residual(const Problem& problem, const ConvexSet& set, const GridFunction& u,
                       double tol = kMembershipTol, double box_factor = 10.0);
/// Same, with the gradient g already evaluated.
ViResidual vi_residual_from_gradient(const ConvexSet& set, const GridFunction& u, const GridFunction& g,
                                     double box_factor = 10.0);

/// |Ψ(v0) - Ψ(u0) - <Av0, v0 - u0>|, which equals ½||v0 - u0||_A^2 for quadratic Ψ.
double equality10_defect(const EllipticOperator& A, const GridFunction& u0, const GridFunction& v0);

}  // namespace hintcvx
