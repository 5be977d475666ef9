#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace hintcvx {

enum class BoundaryCondition { DirichletZero, NeumannZero };

std::string_view to_string(BoundaryCondition bc);
/// Parses "dirichlet-zero" / "neumann-zero"; throws InvalidArgument otherwise.
BoundaryCondition parse_boundary_condition(std::string_view tag);

/// Uniform grid on the radial interval [0, 1] for functions u(|x|) on the unit
/// ball of R^dim. Node i sits at r_i = i*h.
struct RadialGrid {
    std::size_t n = 0;
    int dim = 1;
    double h = 0.0;

    double node(std::size_t i) const { return static_cast<double>(i) * h; }
};

/// Interior nodes of a uniform grid on the unit square, lexicographic with x
/// running fastest. Boundary values are implicitly zero.
struct Square2DGrid {
    std::size_t m = 0;
    double h = 0.0;

    std::size_t index(std::size_t i, std::size_t j) const { return j * m + i; }
    std::pair<std::size_t, std::size_t> cell(std::size_t k) const { return {k % m, k / m}; }
    double coord(std::size_t i) const { return static_cast<double>(i + 1) * h; }
};

/// Immutable grid descriptor: geometry, boundary condition and quadrature.
/// Always handled through std::shared_ptr<const Grid> so grid functions and
/// operators can share it.
class Grid {
public:
    static std::shared_ptr<const Grid> radial(std::size_t n, int dim, BoundaryCondition bc);
    static std::shared_ptr<const Grid> square(std::size_t m);

    bool is_radial() const { return std::holds_alternative<RadialGrid>(geometry_); }
    const RadialGrid& radial_geometry() const;
    const Square2DGrid& square_geometry() const;

    std::size_t size() const { return static_cast<std::size_t>(weights_.size()); }
    BoundaryCondition bc() const { return bc_; }
    /// Spatial dimension of the underlying domain (radial: dim, square: 2).
    int spatial_dim() const;

    const Eigen::VectorXd& weights() const { return weights_; }
    bool is_fixed(std::size_t i) const { return fixed_[i]; }
    const std::vector<std::size_t>& fixed_nodes() const { return fixed_nodes_; }
    /// Zeroes the entries at Dirichlet boundary nodes.
    void mask(Eigen::VectorXd& values) const;

    /// Same geometry and boundary condition.
    bool same_as(const Grid& other) const;
    std::string describe() const;

private:
    Grid(std::variant<RadialGrid, Square2DGrid> geometry, BoundaryCondition bc);

    std::variant<RadialGrid, Square2DGrid> geometry_;
    BoundaryCondition bc_;
    Eigen::VectorXd weights_;
    std::vector<bool> fixed_;
    std::vector<std::size_t> fixed_nodes_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Surface measure of the unit sphere in R^dim; 1 for dim = 1 so that the
/// one-dimensional radial grid represents the interval [0, 1].
double sphere_surface(int dim);

/// Quadrature weights of the grid (control-volume rule, see README).
Eigen::VectorXd quadrature_weights(const Grid& grid);

class GridFunction {
public:
    explicit GridFunction(GridPtr grid);
    GridFunction(GridPtr grid, Eigen::VectorXd values);

    /// Samples f(r) on a radial grid, or f(x, y) on a square grid. Dirichlet
    /// boundary nodes are set to exactly zero.
    static GridFunction sample(GridPtr grid, const std::function<double(double)>& f);
    static GridFunction sample(GridPtr grid, const std::function<double(double, double)>& f);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const Eigen::VectorXd& values() const { return values_; }
    std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
    double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(double s);

private:
    GridPtr grid_;
    Eigen::VectorXd values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double s, GridFunction a);
GridFunction operator*(GridFunction a, double s);

/// Throws GridMismatch unless both live on equivalent grids.
void require_same_grid(const Grid& a, const Grid& b, const char* context);

/// Quadrature-weighted pairing <u, v> = sum_i w_i u_i v_i.
double inner(const GridFunction& u, const GridFunction& v);
double l2_norm(const GridFunction& u);
double max_abs(const GridFunction& u);

enum class OperatorKind { NegLaplacian, NegLaplacianPlusIdentity };

std::string_view to_string(OperatorKind kind);

/// A = W^{-1} S where W = diag(weights) and S is the symmetric stiffness
/// matrix. A is therefore self-adjoint in the weighted pairing. Rows and
/// columns of Dirichlet boundary nodes are zero.
class EllipticOperator {
public:
    EllipticOperator(OperatorKind kind, GridPtr grid, Eigen::SparseMatrix<double> stiffness);

    OperatorKind kind() const { return kind_; }
    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const Eigen::SparseMatrix<double>& stiffness() const { return stiffness_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
    GridFunction apply(const GridFunction& u) const;
    /// <Au, v> = v^T S u.
    double form(const GridFunction& u, const GridFunction& v) const;

    /// False only for the pure Neumann negative Laplacian (constants in the kernel).
    bool positive_definite() const;

private:
    OperatorKind kind_;
    GridPtr grid_;
    Eigen::SparseMatrix<double> stiffness_;
};

/// Radial -Laplacian u'' + (N-1)/r u' in conservative form with r^{N-1}
/// fluxes; u'(0) = 0 is built in through the half cell at the origin.
EllipticOperator build_radial_laplacian(const GridPtr& grid,
                                        OperatorKind kind = OperatorKind::NegLaplacian);
/// Five-point -Laplacian with zero Dirichlet data on the unit square.
EllipticOperator build_2d_laplacian(const GridPtr& grid,
                                    OperatorKind kind = OperatorKind::NegLaplacian);
EllipticOperator build_operator(const GridPtr& grid, OperatorKind kind);

}  // namespace hintcvx
