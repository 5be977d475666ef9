#include "hintcvx/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "hintcvx/convex_analysis.hpp"

namespace hintcvx {

void SolverConfig::validate() const {
    auto bad = [](const char* field, const char* why) {
        throw Error(ErrorKind::InvalidArgument, std::string("solver.") + field + ": " + why);
    };
    if (max_iters <= 0) bad("max_iters", "must be positive");
    if (!(step0 > 0.0)) bad("step0", "must be positive");
    if (!(armijo_c > 0.0 && armijo_c < 1.0)) bad("armijo_c", "must lie in (0, 1)");
    if (!(armijo_shrink > 0.0 && armijo_shrink < 1.0)) bad("armijo_shrink", "must lie in (0, 1)");
    if (!(tol_residual > 0.0)) bad("tol_residual", "must be positive");
    if (!(tol_gradient > 0.0)) bad("tol_gradient", "must be positive");
    if (!(tol_step > 0.0)) bad("tol_step", "must be positive");
    if (!(cg_tol > 0.0)) bad("cg_tol", "must be positive");
    if (cg_max_iters <= 0) bad("cg_max_iters", "must be positive");
    if (path_nodes < 3) bad("path_nodes", "must be >= 3");
    if (!(box_factor >= 1.0)) bad("box_factor", "must be >= 1");
}

// --- conjugate gradients -----------------------------------------------------

GridFunction linear_solve(const EllipticOperator& A, const GridFunction& rhs, const SolverConfig& cfg) {
    require_same_grid(A.grid(), rhs.grid(), "linear_solve");
    if (!A.positive_definite())
        throw Error(ErrorKind::RankDeficient, "linear_solve: pure Neumann Laplacian is singular");
    const Eigen::VectorXd& w = A.grid().weights();
    auto dot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return (w.array() * a.array() * b.array()).sum();
    };

    Eigen::VectorXd b = rhs.values();
    A.grid().mask(b);
    const double bnorm = std::sqrt(dot(b, b));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
    if (bnorm == 0.0) return GridFunction(rhs.grid_ptr(), std::move(x));

    const double target = cfg.cg_tol * bnorm;
    int iters = 0;
    double true_res = bnorm;
    // Restarted CG: the recursive residual drifts from the true one at high
    // accuracy, so convergence is always confirmed on b - Ax.
    while (iters < cfg.cg_max_iters) {
        Eigen::VectorXd r = b - A.apply(x);
        true_res = std::sqrt(dot(r, r));
        if (true_res <= target) return GridFunction(rhs.grid_ptr(), std::move(x));
        Eigen::VectorXd p = r;
        double rr = true_res * true_res;
        const int cycle_start = iters;
        while (iters < cfg.cg_max_iters) {
            const Eigen::VectorXd ap = A.apply(p);
            const double pap = dot(p, ap);
            if (!(pap > 0.0)) break;
            const double alpha = rr / pap;
            x += alpha * p;
            r -= alpha * ap;
            ++iters;
            const double rr_new = dot(r, r);
            if (std::sqrt(rr_new) <= 0.1 * target) break;
            p = r + (rr_new / rr) * p;
            rr = rr_new;
            if (iters - cycle_start >= 4 * static_cast<int>(b.size()) + 50) break;
        }
    }
    Eigen::VectorXd r = b - A.apply(x);
    true_res = std::sqrt(dot(r, r));
    if (true_res <= target) return GridFunction(rhs.grid_ptr(), std::move(x));
    std::ostringstream os;
    os << "linear_solve: CG did not converge in " << cfg.cg_max_iters << " iterations (relative residual "
       << true_res / bnorm << ")";
    throw Error(ErrorKind::IterationLimit, os.str());
}

namespace {

constexpr double kMinStep = 1e-30;
constexpr double kMaxStep = 1e30;

double bb_step(double ss, double sy, double fallback) {
    if (sy > 0.0 && std::isfinite(ss / sy)) return std::clamp(ss / sy, 1e-20, kMaxStep);
    return fallback;
}

/// Cholesky of the Ψ stiffness with identity rows on fixed nodes, used for
/// steps in the energy metric <Au, v>.
class EnergySolver {
public:
    explicit EnergySolver(const EllipticOperator& A) : grid_(A.grid_ptr()) {
        Eigen::SparseMatrix<double> s = A.stiffness();
        for (std::size_t b : grid_->fixed_nodes()) {
            const auto i = static_cast<Eigen::Index>(b);
            s.coeffRef(i, i) = grid_->weights()[i];
        }
        factor_.compute(s);
        if (factor_.info() != Eigen::Success)
            throw Error(ErrorKind::RankDeficient, "energy metric is singular");
    }

    GridFunction riesz(const GridFunction& g) const {
        Eigen::VectorXd rhs = grid_->weights().cwiseProduct(g.values());
        grid_->mask(rhs);
        Eigen::VectorXd x = factor_.solve(rhs);
        grid_->mask(x);
        return GridFunction(g.grid_ptr(), std::move(x));
    }

private:
    GridPtr grid_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor_;
};

/// Diagonal of the Ψ Hessian in increment coordinates, floored by the tail
/// mass so that it stays positive for Neumann problems without identity.
Eigen::VectorXd increment_metric(const EllipticOperator& A) {
    const auto& s = A.stiffness();
    const Eigen::VectorXd& w = A.grid().weights();
    const Eigen::Index n = s.rows();
    Eigen::VectorXd diag(n);
    double acc = 0.0;
    double mass = 0.0;
    for (Eigen::Index j = n - 1; j >= 0; --j) {
        double row = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(s, j); it; ++it) {
            if (it.row() == j)
                row += it.value();
            else if (it.row() > j)
                row += 2.0 * it.value();
        }
        acc += row;
        mass += w[j];
        diag[j] = std::max(acc, mass);
    }
    return diag;
}

Eigen::VectorXd tail_sums(const Eigen::VectorXd& w, const Eigen::VectorXd& g) {
    Eigen::VectorXd c(g.size());
    double acc = 0.0;
    for (Eigen::Index j = g.size() - 1; j >= 0; --j) c[j] = acc += w[j] * g[j];
    return c;
}

/// I(u), or +inf when evaluating Φ overflows.
double total_energy(const Problem& problem, const GridFunction& u) {
    try {
        return energy(problem, u).total;
    } catch (const Error& err) {
        if (err.kind() != ErrorKind::Diverged) throw;
        return std::numeric_limits<double>::infinity();
    }
}

void check_finite(double e, const IterTrace& trace) {
    if (!std::isfinite(e)) throw SolverError(ErrorKind::Diverged, "energy became non-finite", trace);
}

/// Two-metric projected step on the monotone cone in increment coordinates
/// d (u = cumsum d, K = {d >= 0}). Increments pinned at zero with a gradient
/// pushing outwards move by the diagonally scaled gradient; the remaining
/// ones move by the energy-metric Riesz representative restricted to
/// functions that are constant on the current plateaus. Clamping at zero is
/// then the projection.
struct ConeStepper {
    const Problem& problem;
    Eigen::SparseMatrix<double> stiffness;
    Eigen::VectorXd metric;
    double tau;

    ConeStepper(const Problem& p, double step0)
        : problem(p), stiffness(p.psi_operator().stiffness()), metric(increment_metric(p.psi_operator())),
          tau(step0) {
        const Eigen::VectorXd& w = p.grid().weights();
        for (std::size_t b : p.grid().fixed_nodes()) {
            const auto i = static_cast<Eigen::Index>(b);
            stiffness.coeffRef(i, i) = w[i];
        }
    }

    struct Outcome {
        bool accepted = false;
        GridFunction u;
        double energy = 0.0;
        double step = 0.0;
    };

    Eigen::VectorXd direction(const Eigen::VectorXd& d, const Eigen::VectorXd& c, const GridFunction& g) const {
        const Eigen::Index n = d.size();
        const Eigen::VectorXd probe = (d - c.cwiseQuotient(metric)).cwiseMax(0.0);
        const double eps = std::min(1e-8, (d - probe).lpNorm<Eigen::Infinity>());
        std::vector<bool> active(static_cast<std::size_t>(n));
        for (Eigen::Index j = 0; j < n; ++j) active[j] = d[j] <= eps && c[j] > 0.0;

        // Plateau index of every node; a free increment opens a new plateau.
        std::vector<Eigen::Index> group(static_cast<std::size_t>(n));
        Eigen::Index groups = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == 0 || !active[j]) ++groups;
            group[j] = groups - 1;
        }
        // With d_0 pinned the first plateau stays at zero and is not a variable.
        const Eigen::Index shift = active[0] ? 1 : 0;
        const Eigen::Index m = groups - shift;

        Eigen::VectorXd p = c.cwiseQuotient(metric);
        if (m > 0) {
            std::vector<Eigen::Triplet<double>> trip;
            for (Eigen::Index col = 0; col < stiffness.outerSize(); ++col)
                for (Eigen::SparseMatrix<double>::InnerIterator it(stiffness, col); it; ++it) {
                    const Eigen::Index a = group[it.row()] - shift, b = group[col] - shift;
                    if (a >= 0 && b >= 0) trip.emplace_back(a, b, it.value());
                }
            Eigen::SparseMatrix<double> reduced(m, m);
            reduced.setFromTriplets(trip.begin(), trip.end());
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
            const Eigen::VectorXd wg = problem.grid().weights().cwiseProduct(g.values());
            for (Eigen::Index j = 0; j < n; ++j)
                if (group[j] >= shift) rhs[group[j] - shift] += wg[j];
            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(reduced);
            if (ldlt.info() != Eigen::Success) return p;
            const Eigen::VectorXd z = ldlt.solve(rhs);
            auto value = [&](Eigen::Index grp) { return grp < shift ? 0.0 : z[grp - shift]; };
            for (Eigen::Index j = 0; j < n; ++j) {
                if (active[j]) continue;
                p[j] = j == 0 ? value(0) : value(group[j]) - value(group[j] - 1);
            }
        }
        return p;
    }

    /// One projected step with Armijo backtracking on I.
    Outcome step(const GridFunction& u, double e0, const GridFunction& g, const SolverConfig& cfg) {
        const Eigen::VectorXd& w = problem.grid().weights();
        const Eigen::VectorXd d = to_increments(u.values());
        const Eigen::VectorXd c = tail_sums(w, g.values());
        const Eigen::VectorXd p = direction(d, c, g);
        Outcome out{false, u, e0, 0.0};
        for (double t = std::min(cfg.step0, 2.0 * tau); t >= kMinStep; t *= cfg.armijo_shrink) {
            Eigen::VectorXd un_values = from_increments((d - t * p).cwiseMax(0.0));
            problem.grid().mask(un_values);
            GridFunction un(u.grid_ptr(), std::move(un_values));
            const double en = total_energy(problem, un);
            if (std::isfinite(en) && en <= e0 + cfg.armijo_c * inner(g, un - u)) {
                out.step = problem.h2_metric()->norm(un - u);
                out.accepted = true;
                out.u = std::move(un);
                out.energy = en;
                tau = t;
                return out;
            }
        }
        return out;
    }
};

MinimizeResult minimize_over_ball(const Problem& problem, const H2Ball& ball, GridFunction u,
                                  const SolverConfig& cfg) {
    const H2Metric& metric = ball.metric();
    const EnergySolver energy_solver(problem.psi_operator());
    const double r = ball.radius();
    IterTrace trace;

    double e = total_energy(problem, u);
    check_finite(e, trace);
    GridFunction g = energy_grad(problem, u);
    double tau_e = cfg.step0;
    double tau_h = cfg.step0;
    double last_step = 0.0;

    for (int k = 0;; ++k) {
        const GridFunction riesz_h2 = metric.riesz(g);
        const double g_h2 = metric.norm(riesz_h2);
        const double rho = inner(g, u) + r * g_h2;
        const double u_h2 = metric.norm(u);
        trace.records.push_back({k, e, rho, last_step, u_h2});

        const bool on_boundary = u_h2 >= r * (1.0 - 1e-10);
        if (rho <= cfg.tol_residual && (on_boundary || l2_norm(g) <= cfg.tol_gradient)) {
            trace.converged = true;
            trace.stop_reason = "converged";
            break;
        }
        if (k >= cfg.max_iters) {
            trace.stop_reason = "max-iters";
            break;
        }

        std::optional<GridFunction> next;
        double e_next = e;

        // Energy-metric step while it stays inside K: well conditioned for
        // the interior problem. Otherwise fall back to the h2 projected step.
        {
            const GridFunction dir = energy_solver.riesz(g);
            const double slope = inner(g, dir);
            int tries = 0;
            for (double t = tau_e; t >= kMinStep && tries < 12; t *= cfg.armijo_shrink, ++tries) {
                GridFunction trial = u - t * dir;
                if (metric.norm(trial) > r) break;
                const double et = total_energy(problem, trial);
                if (std::isfinite(et) && et <= e - cfg.armijo_c * t * slope) {
                    next = std::move(trial);
                    e_next = et;
                    tau_e = t;
                    break;
                }
            }
        }
        if (!next) {
            for (double t = tau_h; t >= kMinStep; t *= cfg.armijo_shrink) {
                GridFunction trial = project_ball(ball, u - t * riesz_h2);
                const double et = total_energy(problem, trial);
                if (std::isfinite(et) && et <= e + cfg.armijo_c * inner(g, trial - u)) {
                    next = std::move(trial);
                    e_next = et;
                    tau_h = t;
                    break;
                }
            }
        }
        if (!next) {
            trace.stop_reason = "line-search-stalled";
            break;
        }
        check_finite(e_next, trace);

        GridFunction g_next = energy_grad(problem, *next);
        const GridFunction s = *next - u;
        const GridFunction y = g_next - g;
        const double sy = inner(s, y);
        tau_e = bb_step(problem.psi_operator().form(s, s), sy, std::min(2.0 * tau_e, kMaxStep));
        tau_h = bb_step(metric.inner(s, s), sy, std::min(2.0 * tau_h, kMaxStep));

        last_step = metric.norm(s);
        u = std::move(*next);
        e = e_next;
        g = std::move(g_next);
        if (last_step <= cfg.tol_step) {
            trace.records.push_back({k + 1, e, vi_residual_from_gradient(ball, u, g).value, last_step,
                                     metric.norm(u)});
            trace.stop_reason = "step-below-tolerance";
            break;
        }
    }
    return {std::move(u), std::move(trace)};
}

MinimizeResult minimize_over_cone(const Problem& problem, const MonotoneCone& cone, GridFunction u,
                                  const SolverConfig& cfg) {
    ConeStepper stepper(problem, cfg.step0);
    IterTrace trace;
    double e = total_energy(problem, u);
    check_finite(e, trace);
    GridFunction g = energy_grad(problem, u);
    double last_step = 0.0;
    for (int k = 0;; ++k) {
        const double rho = vi_residual_from_gradient(cone, u, g, cfg.box_factor).value;
        trace.records.push_back({k, e, rho, last_step, problem.h2_metric()->norm(u)});
        if (rho <= cfg.tol_residual) {
            trace.converged = true;
            trace.stop_reason = "converged";
            break;
        }
        if (k >= cfg.max_iters) {
            trace.stop_reason = "max-iters";
            break;
        }
        auto out = stepper.step(u, e, g, cfg);
        if (!out.accepted) {
            trace.stop_reason = "line-search-stalled";
            break;
        }
        check_finite(out.energy, trace);
        u = std::move(out.u);
        e = out.energy;
        g = energy_grad(problem, u);
        last_step = out.step;
        if (last_step <= cfg.tol_step) {
            trace.stop_reason = "step-below-tolerance";
            break;
        }
    }
    return {std::move(u), std::move(trace)};
}

}  // namespace

MinimizeResult projected_gradient_minimize(const Problem& problem, const ConvexSet& set,
                                           const GridFunction& u_init, const SolverConfig& cfg) {
    cfg.validate();
    require_same_grid(problem.grid(), u_init.grid(), "projected_gradient_minimize");
    if (!contains(set, u_init)) throw Error(ErrorKind::Precondition, "projected_gradient_minimize: u_init not in K");
    if (const auto* ball = std::get_if<H2Ball>(&set)) return minimize_over_ball(problem, *ball, u_init, cfg);
    return minimize_over_cone(problem, std::get<MonotoneCone>(set), u_init, cfg);
}

// --- mountain pass -------------------------------------------------------------

namespace {

GridFunction lerp(const GridFunction& a, const GridFunction& b, double s) { return a + s * (b - a); }

struct SegmentMax {
    double s = 0.0;
    double energy = -std::numeric_limits<double>::infinity();
};

/// Maximises I on the segment a + s(b - a), s in [0, 1]: golden section for
/// the location, then bisection on the sign of the directional derivative to
/// pin the stationary point to rounding level.
SegmentMax maximize_on_segment(const Problem& problem, const GridFunction& a, const GridFunction& b) {
    const GridFunction dir = b - a;
    auto f = [&](double s) { return energy(problem, lerp(a, b, s)).total; };
    auto slope = [&](double s) { return inner(energy_grad(problem, lerp(a, b, s)), dir); };

    constexpr double kInvPhi = 0.6180339887498949;
    double lo = 0.0, hi = 1.0;
    double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 60 && hi - lo > 1e-9; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = f(x1);
        }
    }
    double s = 0.5 * (lo + hi);
    double blo = std::max(0.0, s - 1e-4), bhi = std::min(1.0, s + 1e-4);
    if (slope(blo) > 0.0 && slope(bhi) < 0.0) {
        for (int it = 0; it < 80 && bhi - blo > 0.0; ++it) {
            const double mid = 0.5 * (blo + bhi);
            if (mid <= blo || mid >= bhi) break;
            (slope(mid) > 0.0 ? blo : bhi) = mid;
        }
        s = 0.5 * (blo + bhi);
    }
    SegmentMax best{s, f(s)};
    for (double end : {0.0, 1.0}) {
        const double fe = f(end);
        if (fe > best.energy) best = {end, fe};
    }
    return best;
}

/// Point of maximal energy on the ray {t z : t >= 0}, or z if I does not
/// decrease along the ray within 2^40 z.
GridFunction ray_maximum(const Problem& problem, const GridFunction& z) {
    const GridFunction zero(z.grid_ptr());
    auto slope = [&](double t) { return inner(energy_grad(problem, t * z), z); };
    double top = 2.0;
    for (int i = 0; i < 40 && slope(top) >= 0.0; ++i) top *= 2.0;
    const GridFunction end = top * z;
    const auto m = maximize_on_segment(problem, zero, end);
    return lerp(zero, end, m.s);
}

/// Path 0 -> peak -> T*peak -> e with T doubled until I stays nonpositive
/// on the last leg. Half of the nodes go to the first leg, so the peak sits
/// at node (nodes - 1) / 2.
std::vector<GridFunction> resample_path(const Problem& problem, const GridFunction& peak, const GridFunction& e,
                                        int nodes) {
    GridFunction far = 2.0 * peak;
    for (int i = 0; i < 60; ++i, far *= 2.0)
        if (energy(problem, far).total <= 0.0 && maximize_on_segment(problem, far, e).energy <= 0.0) break;
    const int last = nodes - 1;
    const int k1 = last / 2;
    const int k2 = k1 + (last - k1) / 2;
    const GridFunction zero(peak.grid_ptr());
    std::vector<GridFunction> path;
    path.reserve(static_cast<std::size_t>(nodes));
    for (int j = 0; j <= last; ++j) {
        if (j <= k1)
            path.push_back(lerp(zero, peak, static_cast<double>(j) / k1));
        else if (j <= k2)
            path.push_back(lerp(peak, far, static_cast<double>(j - k1) / (k2 - k1)));
        else
            path.push_back(lerp(far, e, static_cast<double>(j - k2) / (last - k2)));
    }
    return path;
}

}  // namespace

MountainPassResult mountain_pass(const Problem& problem, const MonotoneCone& cone, const GridFunction& e,
                                 const SolverConfig& cfg) {
    cfg.validate();
    require_same_grid(problem.grid(), e.grid(), "mountain_pass");
    const GridFunction zero(e.grid_ptr());
    const double e0 = energy(problem, zero).total;
    const double ee = energy(problem, e).total;
    if (std::abs(e0) > 1e-14) throw Error(ErrorKind::MountainPassGeometry, "mountain pass needs I(0) = 0");
    if (!(ee <= 0.0)) throw Error(ErrorKind::MountainPassGeometry, "mountain pass needs I(e) <= 0");
    if (!contains(cone, e)) throw Error(ErrorKind::MountainPassGeometry, "endpoint e is not in K");

    const H2Metric& metric = *problem.h2_metric();
    const int nodes = cfg.path_nodes;
    std::vector<GridFunction> path;
    path.reserve(static_cast<std::size_t>(nodes));
    for (int j = 0; j < nodes; ++j) path.push_back(static_cast<double>(j) / (nodes - 1) * e);

    ConeStepper stepper(problem, cfg.step0);
    IterTrace trace;
    double last_step = 0.0;
    GridFunction peak = path.front();
    double level = 0.0;

    for (int it = 0;; ++it) {
        std::vector<double> energies;
        energies.reserve(path.size());
        for (const auto& z : path) energies.push_back(energy(problem, z).total);
        const auto k = static_cast<std::size_t>(
            std::distance(energies.begin(), std::max_element(energies.begin(), energies.end())));
        check_finite(energies[k], trace);
        if (k == 0 || k + 1 == path.size())
            throw SolverError(ErrorKind::MountainPassGeometry, "path maximum sits at an endpoint", trace);

        // Peak selection on the two segments adjacent to the highest node.
        peak = path[k];
        level = energies[k];
        for (std::size_t nb : {k - 1, k + 1}) {
            const auto m = maximize_on_segment(problem, path[nb], path[k]);
            if (m.energy > level) {
                level = m.energy;
                peak = lerp(path[nb], path[k], m.s);
            }
        }
        peak = project_cone(cone, peak);
        level = energy(problem, peak).total;

        const GridFunction g = energy_grad(problem, peak);
        const double rho = vi_residual_from_gradient(cone, peak, g, cfg.box_factor).value;
        trace.records.push_back({it, level, rho, last_step, metric.norm(peak)});
        if (rho <= cfg.tol_residual && l2_norm(g) <= cfg.tol_gradient) {
            trace.converged = true;
            trace.stop_reason = "converged";
            break;
        }
        if (it >= cfg.max_iters) {
            trace.stop_reason = "max-iters";
            break;
        }

        auto pushed = stepper.step(peak, level, g, cfg);
        if (!pushed.accepted) {
            trace.stop_reason = "line-search-stalled";
            break;
        }
        last_step = pushed.step;
        path = resample_path(problem, ray_maximum(problem, pushed.u), e, nodes);
        for (auto& z : path) z = project_cone(cone, z);
    }
    return {std::move(peak), std::move(trace), level};
}

GridFunction default_ball_start(const Problem& problem, const H2Ball& ball) {
    const auto& grid = problem.grid_ptr();
    GridFunction proxy = grid->is_radial()
        ? (grid->radial_geometry().dim == 1
               ? GridFunction::sample(grid, [](double x) { return std::sin(std::numbers::pi * x); })
               : GridFunction::sample(grid, [](double r) { return std::cos(0.5 * std::numbers::pi * r); }))
        : GridFunction::sample(grid, [](double x, double y) {
              return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y);
          });
    const double nrm = ball.metric().norm(proxy);
    return project_ball(ball, (ball.radius() / 10.0 / nrm) * proxy);
}

GridFunction default_path_end(const Problem& problem) {
    const GridFunction one(problem.grid_ptr(), Eigen::VectorXd::Ones(static_cast<Eigen::Index>(problem.grid().size())));
    double t = 1.0;
    for (int i = 0; i < 64; ++i, t *= 2.0)
        if (energy(problem, t * one).total <= 0.0) return t * one;
    throw Error(ErrorKind::MountainPassGeometry, "no endpoint e = t*1 with I(e) <= 0 found");
}

SphereProbe mpg_sphere_probe(const Problem& problem, const MonotoneCone& cone, double rho, int samples,
                             std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> incr(1.0);
    SphereProbe probe;
    probe.min_energy = std::numeric_limits<double>::infinity();
    const auto n = static_cast<Eigen::Index>(cone.grid().size());
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd d(n);
        for (Eigen::Index i = 0; i < n; ++i) d[i] = incr(rng);
        GridFunction u(cone.grid_ptr(), from_increments(d));
        const double h1 = norms(problem, u).h1;
        u *= rho / h1;
        const double e = energy(problem, u).total;
        ++probe.samples;
        if (e > 0.0) ++probe.positive;
        probe.min_energy = std::min(probe.min_energy, e);
    }
    return probe;
}

}  // namespace hintcvx
