#include "hintcvx/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hintcvx/error.hpp"

namespace hintcvx {

std::string_view to_string(BoundaryCondition bc) {
    return bc == BoundaryCondition::DirichletZero ? "dirichlet-zero" : "neumann-zero";
}

BoundaryCondition parse_boundary_condition(std::string_view tag) {
    if (tag == "dirichlet-zero") return BoundaryCondition::DirichletZero;
    if (tag == "neumann-zero") return BoundaryCondition::NeumannZero;
    throw Error(ErrorKind::InvalidArgument, "unknown boundary condition tag '" + std::string(tag) + "'");
}

double sphere_surface(int dim) {
    if (dim < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be >= 1");
    if (dim == 1) return 1.0;
    const double half = 0.5 * dim;
    return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

namespace {

Eigen::VectorXd radial_weights(const RadialGrid& g) {
    // Exact measure of the control volume [r_{i-1/2}, r_{i+1/2}] in the ball;
    // reduces to the trapezoidal rule for dim = 1.
    const double omega = sphere_surface(g.dim);
    const auto n = static_cast<Eigen::Index>(g.n);
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double lo = i == 0 ? 0.0 : (static_cast<double>(i) - 0.5) * g.h;
        const double hi = i == n - 1 ? 1.0 : (static_cast<double>(i) + 0.5) * g.h;
        w[i] = omega / g.dim * (std::pow(hi, g.dim) - std::pow(lo, g.dim));
    }
    return w;
}

}  // namespace

Grid::Grid(std::variant<RadialGrid, Square2DGrid> geometry, BoundaryCondition bc)
    : geometry_(std::move(geometry)), bc_(bc) {
    if (const auto* rg = std::get_if<RadialGrid>(&geometry_)) {
        weights_ = radial_weights(*rg);
        fixed_.assign(rg->n, false);
        if (bc_ == BoundaryCondition::DirichletZero) {
            // dim = 1 is the interval (0, 1) with zero data at both ends;
            // otherwise r = 0 is the ball centre and only r = 1 is boundary.
            if (rg->dim == 1) fixed_.front() = true;
            fixed_.back() = true;
        }
    } else {
        const auto& sg = std::get<Square2DGrid>(geometry_);
        weights_ = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(sg.m * sg.m), sg.h * sg.h);
        fixed_.assign(sg.m * sg.m, false);
    }
    for (std::size_t i = 0; i < fixed_.size(); ++i)
        if (fixed_[i]) fixed_nodes_.push_back(i);
}

std::shared_ptr<const Grid> Grid::radial(std::size_t n, int dim, BoundaryCondition bc) {
    if (n < 3) throw Error(ErrorKind::InvalidArgument, "radial grid needs n >= 3");
    if (dim < 1) throw Error(ErrorKind::InvalidArgument, "radial grid needs dim >= 1");
    RadialGrid g{n, dim, 1.0 / static_cast<double>(n - 1)};
    return std::shared_ptr<const Grid>(new Grid(g, bc));
}

std::shared_ptr<const Grid> Grid::square(std::size_t m) {
    if (m < 2) throw Error(ErrorKind::InvalidArgument, "square grid needs m >= 2");
    Square2DGrid g{m, 1.0 / static_cast<double>(m + 1)};
    return std::shared_ptr<const Grid>(new Grid(g, BoundaryCondition::DirichletZero));
}

const RadialGrid& Grid::radial_geometry() const {
    if (!is_radial()) throw Error(ErrorKind::GridMismatch, "expected a radial grid");
    return std::get<RadialGrid>(geometry_);
}

const Square2DGrid& Grid::square_geometry() const {
    if (is_radial()) throw Error(ErrorKind::GridMismatch, "expected a square grid");
    return std::get<Square2DGrid>(geometry_);
}

int Grid::spatial_dim() const { return is_radial() ? radial_geometry().dim : 2; }

void Grid::mask(Eigen::VectorXd& values) const {
    for (std::size_t i : fixed_nodes_) values[static_cast<Eigen::Index>(i)] = 0.0;
}

bool Grid::same_as(const Grid& other) const {
    if (this == &other) return true;
    if (bc_ != other.bc_ || is_radial() != other.is_radial()) return false;
    if (is_radial()) {
        const auto& a = radial_geometry();
        const auto& b = other.radial_geometry();
        return a.n == b.n && a.dim == b.dim;
    }
    return square_geometry().m == other.square_geometry().m;
}

std::string Grid::describe() const {
    std::ostringstream os;
    if (is_radial())
        os << "radial(n=" << radial_geometry().n << ", dim=" << radial_geometry().dim;
    else
        os << "square(m=" << square_geometry().m;
    os << ", " << to_string(bc_) << ")";
    return os.str();
}

Eigen::VectorXd quadrature_weights(const Grid& grid) { return grid.weights(); }

void require_same_grid(const Grid& a, const Grid& b, const char* context) {
    if (!a.same_as(b))
        throw Error(ErrorKind::GridMismatch,
                    std::string(context) + ": " + a.describe() + " vs " + b.describe());
}

// --- GridFunction ----------------------------------------------------------

GridFunction::GridFunction(GridPtr grid) : grid_(std::move(grid)) {
    if (!grid_) throw Error(ErrorKind::InvalidArgument, "null grid");
    values_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid_->size()));
}

GridFunction::GridFunction(GridPtr grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw Error(ErrorKind::InvalidArgument, "null grid");
    if (static_cast<std::size_t>(values_.size()) != grid_->size())
        throw Error(ErrorKind::GridMismatch, "grid function length does not match node count");
    if (!values_.allFinite()) throw Error(ErrorKind::Diverged, "grid function has non-finite values");
    for (std::size_t i : grid_->fixed_nodes())
        if (std::abs(values_[static_cast<Eigen::Index>(i)]) > 1e-12)
            throw Error(ErrorKind::InvalidArgument, "grid function violates zero Dirichlet data");
}

GridFunction GridFunction::sample(GridPtr grid, const std::function<double(double)>& f) {
    const auto& g = grid->radial_geometry();
    Eigen::VectorXd v(static_cast<Eigen::Index>(g.n));
    for (std::size_t i = 0; i < g.n; ++i) v[static_cast<Eigen::Index>(i)] = f(g.node(i));
    grid->mask(v);
    return GridFunction(std::move(grid), std::move(v));
}

GridFunction GridFunction::sample(GridPtr grid, const std::function<double(double, double)>& f) {
    const auto& g = grid->square_geometry();
    Eigen::VectorXd v(static_cast<Eigen::Index>(g.m * g.m));
    for (std::size_t k = 0; k < g.m * g.m; ++k) {
        auto [i, j] = g.cell(k);
        v[static_cast<Eigen::Index>(k)] = f(g.coord(i), g.coord(j));
    }
    return GridFunction(std::move(grid), std::move(v));
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    require_same_grid(*grid_, other.grid(), "GridFunction +=");
    values_ += other.values_;
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    require_same_grid(*grid_, other.grid(), "GridFunction -=");
    values_ -= other.values_;
    return *this;
}

GridFunction& GridFunction::operator*=(double s) {
    values_ *= s;
    return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double s, GridFunction a) { return a *= s; }
GridFunction operator*(GridFunction a, double s) { return a *= s; }

double inner(const GridFunction& u, const GridFunction& v) {
    require_same_grid(u.grid(), v.grid(), "inner");
    return (u.grid().weights().array() * u.values().array() * v.values().array()).sum();
}

double l2_norm(const GridFunction& u) { return std::sqrt(std::max(0.0, inner(u, u))); }

double max_abs(const GridFunction& u) { return u.values().size() ? u.values().cwiseAbs().maxCoeff() : 0.0; }

// --- operators -------------------------------------------------------------

std::string_view to_string(OperatorKind kind) {
    return kind == OperatorKind::NegLaplacian ? "neg-laplacian" : "neg-laplacian-plus-identity";
}

EllipticOperator::EllipticOperator(OperatorKind kind, GridPtr grid, Eigen::SparseMatrix<double> stiffness)
    : kind_(kind), grid_(std::move(grid)), stiffness_(std::move(stiffness)) {
    const auto n = static_cast<Eigen::Index>(grid_->size());
    if (stiffness_.rows() != n || stiffness_.cols() != n)
        throw Error(ErrorKind::GridMismatch, "stiffness matrix does not match grid");
}

Eigen::VectorXd EllipticOperator::apply(const Eigen::VectorXd& u) const {
    Eigen::VectorXd su = stiffness_ * u;
    return su.cwiseQuotient(grid_->weights());
}

GridFunction EllipticOperator::apply(const GridFunction& u) const {
    require_same_grid(*grid_, u.grid(), "EllipticOperator::apply");
    return GridFunction(grid_, apply(u.values()));
}

double EllipticOperator::form(const GridFunction& u, const GridFunction& v) const {
    require_same_grid(*grid_, u.grid(), "EllipticOperator::form");
    require_same_grid(*grid_, v.grid(), "EllipticOperator::form");
    return v.values().dot(stiffness_ * u.values());
}

bool EllipticOperator::positive_definite() const {
    return kind_ == OperatorKind::NegLaplacianPlusIdentity ||
           grid_->bc() == BoundaryCondition::DirichletZero;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

Eigen::SparseMatrix<double> finish(const Grid& grid, Triplets& t, OperatorKind kind) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    if (kind == OperatorKind::NegLaplacianPlusIdentity)
        for (Eigen::Index i = 0; i < n; ++i) t.emplace_back(i, i, grid.weights()[i]);
    if (!grid.fixed_nodes().empty()) {
        std::erase_if(t, [&](const Eigen::Triplet<double>& e) {
            return grid.is_fixed(static_cast<std::size_t>(e.row())) ||
                   grid.is_fixed(static_cast<std::size_t>(e.col()));
        });
    }
    Eigen::SparseMatrix<double> s(n, n);
    s.setFromTriplets(t.begin(), t.end());
    s.makeCompressed();
    return s;
}

}  // namespace

EllipticOperator build_radial_laplacian(const GridPtr& grid, OperatorKind kind) {
    const auto& g = grid->radial_geometry();
    const double omega = sphere_surface(g.dim);
    Triplets t;
    t.reserve(4 * g.n);
    for (std::size_t i = 0; i + 1 < g.n; ++i) {
        const double mid = (static_cast<double>(i) + 0.5) * g.h;
        const double c = omega * std::pow(mid, g.dim - 1) / g.h;
        const auto a = static_cast<Eigen::Index>(i);
        t.emplace_back(a, a, c);
        t.emplace_back(a + 1, a + 1, c);
        t.emplace_back(a, a + 1, -c);
        t.emplace_back(a + 1, a, -c);
    }
    return EllipticOperator(kind, grid, finish(*grid, t, kind));
}

EllipticOperator build_2d_laplacian(const GridPtr& grid, OperatorKind kind) {
    const auto& g = grid->square_geometry();
    Triplets t;
    t.reserve(5 * g.m * g.m);
    // Each edge of the h-lattice contributes (u_a - u_b)^2 (area h^2 times
    // squared difference quotient); edges to the boundary see u_b = 0.
    for (std::size_t j = 0; j < g.m; ++j) {
        for (std::size_t i = 0; i < g.m; ++i) {
            const auto k = static_cast<Eigen::Index>(g.index(i, j));
            t.emplace_back(k, k, 4.0);
            if (i + 1 < g.m) {
                const auto r = static_cast<Eigen::Index>(g.index(i + 1, j));
                t.emplace_back(k, r, -1.0);
                t.emplace_back(r, k, -1.0);
            }
            if (j + 1 < g.m) {
                const auto u = static_cast<Eigen::Index>(g.index(i, j + 1));
                t.emplace_back(k, u, -1.0);
                t.emplace_back(u, k, -1.0);
            }
        }
    }
    return EllipticOperator(kind, grid, finish(*grid, t, kind));
}

EllipticOperator build_operator(const GridPtr& grid, OperatorKind kind) {
    return grid->is_radial() ? build_radial_laplacian(grid, kind) : build_2d_laplacian(grid, kind);
}

}  // namespace hintcvx
