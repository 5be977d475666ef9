#pragma once

#include <memory>
#include <optional>
#include <string_view>

#include <Eigen/SparseCholesky>

#include "hintcvx/grid.hpp"

namespace hintcvx {

enum class Family { ConcaveConvex, Nonhomogeneous, NeumannRadial };

std::string_view to_string(Family family);
Family parse_family(std::string_view tag);

/// One of the three model problems
///   concave-convex:  -Δu = |u|^{p-2}u + μ|u|^{q-2}u,  u = 0 on ∂Ω
///   nonhomogeneous:  -Δu = |u|^{p-2}u + f,            u = 0 on ∂Ω
///   neumann-radial:  -Δu + u = a(|x|)|u|^{p-2}u,      ∂u/∂ν = 0 on ∂B_1
struct ProblemSpec {
    Family family = Family::ConcaveConvex;
    GridPtr grid;
    double p = 4.0;
    double q = 1.5;                       // concave-convex only
    double mu = 0.0;                      // concave-convex only
    std::optional<GridFunction> forcing;  // nonhomogeneous only
    std::optional<GridFunction> weight;   // neumann-radial only
    double C1 = 1.0;
    std::optional<double> radius;         // ball families; unset means "pick from the window"

    /// Throws InvalidArgument naming the offending field.
    void validate() const;
};

/// p* = (2n-4)/(n-4) for n > 4, +inf otherwise.
double critical_exponent_h2(int n);

struct EnergyBreakdown {
    double psi = 0.0;
    double phi = 0.0;
    double total = 0.0;
};

struct Norms {
    double l2 = 0.0;
    double lp = 0.0;
    double h1 = 0.0;
    double h2 = 0.0;
};

/// h2^2 = |u|_2^2 + |∇u|_2^2 + |Lu|_2^2 with L the grid's negative Laplacian,
/// plus its Riesz map (a sparse LDLT factorisation of W(I + L + L^2)).
class H2Metric {
public:
    explicit H2Metric(std::shared_ptr<const EllipticOperator> laplacian);

    const EllipticOperator& laplacian() const { return *laplacian_; }
    const Grid& grid() const { return laplacian_->grid(); }

    double inner(const GridFunction& u, const GridFunction& v) const;
    double norm(const GridFunction& u) const;
    /// G with <G, v>_h2 = <g, v> for all admissible v.
    GridFunction riesz(const GridFunction& g) const;

private:
    std::shared_ptr<const EllipticOperator> laplacian_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor_;
};

/// Validated spec plus the operators every evaluation needs, assembled once.
class Problem {
public:
    explicit Problem(ProblemSpec spec);

    const ProblemSpec& spec() const { return spec_; }
    Family family() const { return spec_.family; }
    const Grid& grid() const { return *spec_.grid; }
    const GridPtr& grid_ptr() const { return spec_.grid; }

    /// Operator of Ψ: -Δ for the ball families, -Δ + I for neumann-radial.
    const EllipticOperator& psi_operator() const { return *psi_op_; }
    const EllipticOperator& laplacian() const { return *laplacian_; }
    const std::shared_ptr<const H2Metric>& h2_metric() const { return h2_; }

private:
    ProblemSpec spec_;
    std::shared_ptr<const EllipticOperator> laplacian_;
    std::shared_ptr<const EllipticOperator> psi_op_;
    std::shared_ptr<const H2Metric> h2_;
};

/// Ψ(u) = ½<Au, u>.
double psi_value(const Problem& problem, const GridFunction& u);
/// DΨ(u) = Au.
GridFunction psi_grad(const Problem& problem, const GridFunction& u);
double phi_value(const Problem& problem, const GridFunction& u);
/// Node-wise right-hand side of the equation. The sublinear term is taken as
/// zero at nodes where u = 0. Throws Diverged on overflow.
GridFunction phi_grad(const Problem& problem, const GridFunction& u);
EnergyBreakdown energy(const Problem& problem, const GridFunction& u);
/// DΨ(u) - DΦ(u).
GridFunction energy_grad(const Problem& problem, const GridFunction& u);

Norms norms(const GridFunction& u, const EllipticOperator& laplacian, double p);
Norms norms(const Problem& problem, const GridFunction& u);

}  // namespace hintcvx
