#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hintcvx/convex_sets.hpp"
#include "hintcvx/error.hpp"

namespace hintcvx {

struct SolverConfig {
    int max_iters = 20000;
    double step0 = 1.0;
    double armijo_c = 1e-4;
    double armijo_shrink = 0.5;
    /// Stop when the variational-inequality residual drops below this ...
    double tol_residual = 1e-11;
    /// ... and, for iterates off the constraint boundary, the weighted l2
    /// norm of DΨ - DΦ drops below this.
    double tol_gradient = 1e-9;
    double tol_step = 1e-15;
    double cg_tol = 1e-10;
    int cg_max_iters = 50000;
    std::uint64_t seed = 0;
    int path_nodes = 40;
    double box_factor = 10.0;

    void validate() const;
};

struct IterRecord {
    int k = 0;
    double energy = 0.0;
    double vi_residual = 0.0;
    double step = 0.0;
    double h2_norm = 0.0;
};

struct IterTrace {
    std::vector<IterRecord> records;
    bool converged = false;
    std::string stop_reason;
};

/// Solver failure that still carries the iteration history.
class SolverError : public Error {
public:
    SolverError(ErrorKind kind, const std::string& what, IterTrace trace)
        : Error(kind, what), trace_(std::move(trace)) {}
    const IterTrace& trace() const { return trace_; }

private:
    IterTrace trace_;
};

/// Conjugate gradients in the weighted pairing (A is self-adjoint there).
/// Guarantees ||A v - rhs|| <= cg_tol ||rhs||, evaluated on the returned v.
/// Throws IterationLimit (message carries the last residual) otherwise.
GridFunction linear_solve(const EllipticOperator& A, const GridFunction& rhs, const SolverConfig& cfg);

struct MinimizeResult {
    GridFunction u;
    IterTrace trace;
};

/// Projected gradient with Armijo backtracking on I = Ψ - Φ over K. Every
/// accepted step decreases I; every iterate stays in K.
MinimizeResult projected_gradient_minimize(const Problem& problem, const ConvexSet& set,
                                           const GridFunction& u_init, const SolverConfig& cfg);

struct MountainPassResult {
    GridFunction u;
    IterTrace trace;
    double level = 0.0;
};

/// Discretised-path mountain pass between 0 and e inside the monotone cone.
MountainPassResult mountain_pass(const Problem& problem, const MonotoneCone& cone, const GridFunction& e,
                                 const SolverConfig& cfg);

/// Starting point for ball problems: the lowest Dirichlet mode scaled to
/// h2 norm r/10.
GridFunction default_ball_start(const Problem& problem, const H2Ball& ball);
/// Path endpoint t*1 with t doubled from 1 until I(t*1) <= 0.
GridFunction default_path_end(const Problem& problem);

struct SphereProbe {
    int samples = 0;
    int positive = 0;
    double min_energy = 0.0;
};

/// Samples cone members with ||u||_h1 = rho and records the sign of I there.
SphereProbe mpg_sphere_probe(const Problem& problem, const MonotoneCone& cone, double rho, int samples,
                             std::uint64_t seed);

}  // namespace hintcvx
