#include "hintcvx/functionals.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hintcvx/error.hpp"

namespace hintcvx {

std::string_view to_string(Family family) {
    switch (family) {
        case Family::ConcaveConvex: return "concave-convex";
        case Family::Nonhomogeneous: return "nonhomogeneous";
        case Family::NeumannRadial: return "neumann-radial";
    }
    return "unknown";
}

Family parse_family(std::string_view tag) {
    if (tag == "concave-convex") return Family::ConcaveConvex;
    if (tag == "nonhomogeneous") return Family::Nonhomogeneous;
    if (tag == "neumann-radial") return Family::NeumannRadial;
    throw Error(ErrorKind::InvalidArgument, "family: unknown problem family '" + std::string(tag) + "'");
}

double critical_exponent_h2(int n) {
    if (n > 4) return (2.0 * n - 4.0) / (n - 4.0);
    return std::numeric_limits<double>::infinity();
}

namespace {

[[noreturn]] void reject(const std::string& field, const std::string& why) {
    throw Error(ErrorKind::InvalidArgument, field + ": " + why);
}

}  // namespace

void ProblemSpec::validate() const {
    if (!grid) reject("grid", "missing");
    if (!(C1 > 0.0) || !std::isfinite(C1)) reject("C1", "must be a positive number");
    if (!(p > 2.0) || !std::isfinite(p)) reject("p", "must satisfy p > 2");
    if (radius && !(*radius > 0.0)) reject("r", "constraint radius must be positive");

    const bool ball_family = family != Family::NeumannRadial;
    if (ball_family) {
        if (grid->bc() != BoundaryCondition::DirichletZero)
            reject("grid.bc", "ball families need dirichlet-zero");
        const double pstar = critical_exponent_h2(grid->spatial_dim());
        if (!(p < pstar)) reject("p", "must satisfy p < p* = " + std::to_string(pstar));
    }
    switch (family) {
        case Family::ConcaveConvex:
            if (!(q > 1.0 && q < 2.0)) reject("q", "must satisfy 1 < q < 2");
            if (!(mu >= 0.0) || !std::isfinite(mu)) reject("mu", "must be >= 0");
            break;
        case Family::Nonhomogeneous:
            if (forcing) require_same_grid(*grid, forcing->grid(), "f");
            break;
        case Family::NeumannRadial: {
            if (!grid->is_radial()) reject("grid.kind", "neumann-radial needs a radial grid");
            if (grid->bc() != BoundaryCondition::NeumannZero)
                reject("grid.bc", "neumann-radial needs neumann-zero");
            if (!weight) reject("a", "radial weight is required");
            require_same_grid(*grid, weight->grid(), "a");
            const auto& a = weight->values();
            for (Eigen::Index i = 0; i < a.size(); ++i) {
                if (a[i] < 0.0) reject("a", "weight must be nonnegative");
                if (i > 0 && a[i] < a[i - 1]) reject("a", "weight must be nondecreasing in r");
            }
            break;
        }
    }
}

// --- H2 metric ---------------------------------------------------------------

H2Metric::H2Metric(std::shared_ptr<const EllipticOperator> laplacian) : laplacian_(std::move(laplacian)) {
    const auto& s = laplacian_->stiffness();
    const Eigen::VectorXd& w = laplacian_->grid().weights();
    Eigen::SparseMatrix<double> wdiag(s.rows(), s.cols());
    Eigen::SparseMatrix<double> winv(s.rows(), s.cols());
    wdiag.reserve(Eigen::VectorXi::Constant(s.cols(), 1));
    winv.reserve(Eigen::VectorXi::Constant(s.cols(), 1));
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        wdiag.insert(i, i) = w[i];
        winv.insert(i, i) = 1.0 / w[i];
    }
    Eigen::SparseMatrix<double> gram = wdiag + s + Eigen::SparseMatrix<double>(s * winv * s);
    factor_.compute(gram);
    if (factor_.info() != Eigen::Success)
        throw Error(ErrorKind::RankDeficient, "H2 Gram matrix factorisation failed");
}

double H2Metric::inner(const GridFunction& u, const GridFunction& v) const {
    require_same_grid(grid(), u.grid(), "H2Metric::inner");
    require_same_grid(grid(), v.grid(), "H2Metric::inner");
    const Eigen::VectorXd& w = grid().weights();
    const Eigen::VectorXd lu = laplacian_->apply(u.values());
    const Eigen::VectorXd lv = laplacian_->apply(v.values());
    return (w.array() * u.values().array() * v.values().array()).sum() +
           v.values().dot(laplacian_->stiffness() * u.values()) + (w.array() * lu.array() * lv.array()).sum();
}

double H2Metric::norm(const GridFunction& u) const { return std::sqrt(std::max(0.0, inner(u, u))); }

GridFunction H2Metric::riesz(const GridFunction& g) const {
    require_same_grid(grid(), g.grid(), "H2Metric::riesz");
    Eigen::VectorXd rhs = grid().weights().cwiseProduct(g.values());
    grid().mask(rhs);
    Eigen::VectorXd sol = factor_.solve(rhs);
    grid().mask(sol);
    return GridFunction(g.grid_ptr(), std::move(sol));
}

// --- Problem -----------------------------------------------------------------

Problem::Problem(ProblemSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    laplacian_ = std::make_shared<const EllipticOperator>(build_operator(spec_.grid, OperatorKind::NegLaplacian));
    if (spec_.family == Family::NeumannRadial)
        psi_op_ = std::make_shared<const EllipticOperator>(
            build_operator(spec_.grid, OperatorKind::NegLaplacianPlusIdentity));
    else
        psi_op_ = laplacian_;
    h2_ = std::make_shared<const H2Metric>(laplacian_);
}

double psi_value(const Problem& problem, const GridFunction& u) {
    return 0.5 * problem.psi_operator().form(u, u);
}

GridFunction psi_grad(const Problem& problem, const GridFunction& u) { return problem.psi_operator().apply(u); }

namespace {

double signed_power(double x, double e) { return x == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(x), e), x); }

}  // namespace

double phi_value(const Problem& problem, const GridFunction& u) {
    require_same_grid(problem.grid(), u.grid(), "phi_value");
    const auto& spec = problem.spec();
    const Eigen::VectorXd& w = problem.grid().weights();
    const Eigen::VectorXd& x = u.values();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double ax = std::abs(x[i]);
        double density = std::pow(ax, spec.p) / spec.p;
        switch (spec.family) {
            case Family::ConcaveConvex:
                if (spec.mu != 0.0) density += spec.mu * std::pow(ax, spec.q) / spec.q;
                break;
            case Family::Nonhomogeneous:
                if (spec.forcing) density += (*spec.forcing)[static_cast<std::size_t>(i)] * x[i];
                break;
            case Family::NeumannRadial:
                density *= (*spec.weight)[static_cast<std::size_t>(i)];
                break;
        }
        sum += w[i] * density;
    }
    if (!std::isfinite(sum)) throw Error(ErrorKind::Diverged, "phi_value overflowed");
    return sum;
}

GridFunction phi_grad(const Problem& problem, const GridFunction& u) {
    require_same_grid(problem.grid(), u.grid(), "phi_grad");
    const auto& spec = problem.spec();
    const Eigen::VectorXd& x = u.values();
    Eigen::VectorXd out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double v = signed_power(x[i], spec.p - 1.0);
        switch (spec.family) {
            case Family::ConcaveConvex:
                if (spec.mu != 0.0) v += spec.mu * signed_power(x[i], spec.q - 1.0);
                break;
            case Family::Nonhomogeneous:
                if (spec.forcing) v += (*spec.forcing)[static_cast<std::size_t>(i)];
                break;
            case Family::NeumannRadial:
                v *= (*spec.weight)[static_cast<std::size_t>(i)];
                break;
        }
        out[i] = v;
    }
    if (!out.allFinite()) throw Error(ErrorKind::Diverged, "phi_grad produced non-finite values (degenerate input)");
    problem.grid().mask(out);
    return GridFunction(u.grid_ptr(), std::move(out));
}

EnergyBreakdown energy(const Problem& problem, const GridFunction& u) {
    EnergyBreakdown e;
    e.psi = psi_value(problem, u);
    e.phi = phi_value(problem, u);
    e.total = e.psi - e.phi;
    return e;
}

GridFunction energy_grad(const Problem& problem, const GridFunction& u) {
    return psi_grad(problem, u) - phi_grad(problem, u);
}

Norms norms(const GridFunction& u, const EllipticOperator& laplacian, double p) {
    require_same_grid(laplacian.grid(), u.grid(), "norms");
    const Eigen::VectorXd& w = u.grid().weights();
    const Eigen::VectorXd& x = u.values();
    Norms n;
    const double l2sq = (w.array() * x.array().square()).sum();
    const double gradsq = std::max(0.0, laplacian.form(u, u));
    const Eigen::VectorXd lu = laplacian.apply(x);
    const double lapsq = (w.array() * lu.array().square()).sum();
    n.l2 = std::sqrt(l2sq);
    n.lp = std::pow((w.array() * x.array().abs().pow(p)).sum(), 1.0 / p);
    n.h1 = std::sqrt(l2sq + gradsq);
    n.h2 = std::sqrt(l2sq + gradsq + lapsq);
    return n;
}

Norms norms(const Problem& problem, const GridFunction& u) { return norms(u, problem.laplacian(), problem.spec().p); }

}  // namespace hintcvx
