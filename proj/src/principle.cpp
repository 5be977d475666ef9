#include "hintcvx/principle.hpp"

#include <algorithm>
#include <cmath>

namespace hintcvx {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Certified: return "certified";
        case Verdict::StepIIFailed: return "step-ii-failed";
        case Verdict::NotCritical: return "not-critical";
    }
    return "unknown";
}

namespace {

/// Bisection for the crossing of h(r) = 1 between `inside` (h <= 1) and
/// `outside` (h > 1); returns the last point known to be inside.
template <class H>
double crossing(H h, double inside, double outside) {
    for (int it = 0; it < 400 && std::abs(outside - inside) > 1e-13; ++it) {
        const double mid = 0.5 * (inside + outside);
        if (mid == inside || mid == outside) break;
        (h(mid) <= 1.0 ? inside : outside) = mid;
    }
    return inside;
}

/// h(r) = C1 r^{p-2} + C1 c r^{e-2}, the inequality divided by r. With c > 0
/// and e < 2 < p it decreases then increases, so {h <= 1} is an interval.
std::optional<RadiusWindow> window_for(double C1, double c, double p, double e) {
    auto h = [&](double r) { return C1 * std::pow(r, p - 2.0) + (c > 0.0 ? C1 * c * std::pow(r, e - 2.0) : 0.0); };
    if (c == 0.0) {
        double hi = 1.0;
        while (h(hi) <= 1.0) hi *= 2.0;
        return RadiusWindow{0.0, crossing(h, 0.0, hi)};
    }
    const double rmin = std::pow(c * (2.0 - e) / (p - 2.0), 1.0 / (p - e));
    if (h(rmin) > 1.0) return std::nullopt;
    double lo = rmin, hi = rmin;
    while (h(lo) <= 1.0) lo *= 0.5;
    while (h(hi) <= 1.0) hi *= 2.0;
    return RadiusWindow{crossing(h, rmin, lo), crossing(h, rmin, hi)};
}

void check_window_params(double C1, double mu, double p, double q) {
    if (!(C1 > 0.0)) throw Error(ErrorKind::InvalidArgument, "C1: must be positive");
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw Error(ErrorKind::InvalidArgument, "mu: must be >= 0");
    if (!(q > 1.0 && q < 2.0)) throw Error(ErrorKind::InvalidArgument, "q: must satisfy 1 < q < 2");
    if (!(p > 2.0) || !std::isfinite(p)) throw Error(ErrorKind::InvalidArgument, "p: must satisfy p > 2");
}

}  // namespace

std::optional<RadiusWindow> radius_window(double C1, double mu, double p, double q) {
    check_window_params(C1, mu, p, q);
    return window_for(C1, mu, p, q);
}

std::optional<RadiusWindow> forcing_radius_window(double C1, double p, double forcing_norm) {
    if (!(C1 > 0.0)) throw Error(ErrorKind::InvalidArgument, "C1: must be positive");
    if (!(p > 2.0)) throw Error(ErrorKind::InvalidArgument, "p: must satisfy p > 2");
    if (!(forcing_norm >= 0.0)) throw Error(ErrorKind::InvalidArgument, "f: norm must be finite");
    return window_for(C1, forcing_norm, p, 1.0);
}

MuStar mu_star(double C1, double p, double q) {
    check_window_params(C1, 0.0, p, q);
    auto m = [&](double r) { return (std::pow(r, 2.0 - q) - C1 * std::pow(r, p - q)) / C1; };
    // m > 0 exactly on (0, C1^{-1/(p-2)}) and is unimodal there.
    double lo = 0.0, hi = std::pow(C1, -1.0 / (p - 2.0));
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
    double f1 = m(x1), f2 = m(x2);
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = m(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = m(x1);
        }
    }
    MuStar out;
    out.argmax = 0.5 * (lo + hi);
    out.value = m(out.argmax);
    if (!(out.value > 0.0)) {
        out.value = 0.0;
        out.degenerate = true;
    }
    return out;
}

double default_radius(const RadiusWindow& w) { return w.r1 > 0.0 ? std::sqrt(w.r1 * w.r2) : 0.5 * w.r2; }

StepIIResult step_ii_verify(const Problem& problem, const ConvexSet& set, const GridFunction& u0,
                            const RunOptions& options) {
    const GridFunction rhs = phi_grad(problem, u0);
    GridFunction v0 = linear_solve(problem.psi_operator(), rhs, options.solver);
    const bool in_K = contains(set, v0, options.tol.membership);
    const Norms vn = norms(problem, v0);
    const Norms un = norms(problem, u0);
    const auto& spec = problem.spec();
    double bound = std::pow(un.h2, spec.p - 1.0);
    switch (spec.family) {
        case Family::ConcaveConvex: bound += spec.mu * std::pow(un.h2, spec.q - 1.0); break;
        case Family::Nonhomogeneous: bound += spec.forcing ? l2_norm(*spec.forcing) : 0.0; break;
        case Family::NeumannRadial: bound *= max_abs(*spec.weight); break;
    }
    return {std::move(v0), in_K, vn, vn.h2, spec.C1 * bound};
}

namespace {

void fill_certificate(Certificate& cert, const Problem& problem, const ConvexSet& set, const GridFunction& u0,
                      const RunOptions& options) {
    const GridFunction g = energy_grad(problem, u0);
    cert.u0 = u0;
    cert.energy = energy(problem, u0).total;
    cert.u0_h2_norm = problem.h2_metric()->norm(u0);
    cert.strong_residual = l2_norm(g);
    if (problem.family() == Family::NeumannRadial) {
        const auto rep = monotonicity_report(u0, options.tol.membership);
        cert.min_u0 = rep.min_value;
        cert.monotonicity_defects = rep.defects;
    }
    if (!contains(set, u0, options.tol.membership)) {
        cert.verdict = Verdict::NotCritical;
        cert.reason = "step (i) output is not in K";
        return;
    }
    const auto vi = vi_residual_from_gradient(set, u0, g, options.solver.box_factor);
    cert.vi_residual = vi.value;
    cert.box_bound = vi.box_bound;

    StepIIResult step2 = [&] {
        try {
            return step_ii_verify(problem, set, u0, options);
        } catch (const Error& err) {
            cert.stage_error = "step-ii";
            throw;
        }
    }();
    const EllipticOperator& A = problem.psi_operator();
    cert.v0_in_K = step2.in_K;
    cert.v0_h2_norm = step2.v0_norms.h2;
    cert.chain_lhs = step2.chain_lhs;
    cert.chain_rhs = step2.chain_rhs;
    cert.eq10_defect = equality10_defect(A, u0, step2.v0);
    cert.duality_gap = duality_gap(A, u0, phi_grad(problem, u0), options.solver);
    const GridFunction diff = u0 - step2.v0;
    cert.u0_v0_energy_distance = std::sqrt(std::max(0.0, A.form(diff, diff)));
    cert.v0 = std::move(step2.v0);

    const bool critical = cert.vi_residual <= options.tol.vi;
    const bool strong = cert.strong_residual <= options.tol.strong;
    if (!critical) {
        cert.verdict = Verdict::NotCritical;
        cert.reason = "variational-inequality residual above tolerance";
    } else if (!cert.v0_in_K) {
        cert.verdict = Verdict::StepIIFailed;
        cert.reason = "v0 solving DPsi(v0) = DPhi(u0) lies outside K";
    } else if (!strong) {
        cert.verdict = Verdict::NotCritical;
        cert.reason = "strong residual above tolerance";
    } else {
        cert.verdict = Verdict::Certified;
        cert.reason = "u0 is critical on K and v0 is in K";
    }
}

}  // namespace

RunResult run_problem(const ProblemSpec& spec, const RunOptions& options) {
    options.solver.validate();
    const Problem problem(spec);
    RunResult result;
    Certificate& cert = result.certificate;
    cert.problem = std::string(to_string(spec.family));

    if (spec.family == Family::NeumannRadial) {
        const MonotoneCone cone(problem.grid_ptr());
        result.report.method = "mountain-pass";
        std::optional<GridFunction> u0;
        try {
            const GridFunction e = default_path_end(problem);
            auto mp = mountain_pass(problem, cone, e, options.solver);
            cert.mountain_pass_level = mp.level;
            result.report.trace = std::move(mp.trace);
            u0 = std::move(mp.u);
        } catch (const SolverError& err) {
            result.report.trace = err.trace();
            cert.stage_error = "step-i";
            cert.reason = err.what();
            return result;
        } catch (const Error& err) {
            cert.stage_error = "step-i";
            cert.reason = err.what();
            return result;
        }
        try {
            fill_certificate(cert, problem, cone, *u0, options);
        } catch (const Error& err) {
            if (cert.stage_error.empty()) cert.stage_error = "certificate";
            cert.verdict = Verdict::NotCritical;
            cert.reason = err.what();
        }
        return result;
    }

    if (spec.family == Family::ConcaveConvex)
        cert.window = radius_window(spec.C1, spec.mu, spec.p, spec.q);
    else
        cert.window = forcing_radius_window(spec.C1, spec.p, spec.forcing ? l2_norm(*spec.forcing) : 0.0);

    if (spec.radius) {
        cert.radius = *spec.radius;
    } else if (cert.window) {
        cert.radius = default_radius(*cert.window);
    } else {
        cert.verdict = Verdict::StepIIFailed;
        cert.reason = spec.family == Family::ConcaveConvex
            ? "radius window is empty (mu >= mu*): no radius r with C1(r^{p-1} + mu r^{q-1}) <= r"
            : "radius window is empty: forcing too large for C1(r^{p-1} + ||f||) <= r";
        return result;
    }

    const H2Ball ball(*cert.radius, problem.h2_metric());
    result.report.method = "projected-gradient";
    std::optional<GridFunction> u0;
    try {
        auto min = projected_gradient_minimize(problem, ball, default_ball_start(problem, ball), options.solver);
        result.report.trace = std::move(min.trace);
        u0 = std::move(min.u);
    } catch (const SolverError& err) {
        result.report.trace = err.trace();
        cert.stage_error = "step-i";
        cert.reason = err.what();
        return result;
    } catch (const Error& err) {
        cert.stage_error = "step-i";
        cert.reason = err.what();
        return result;
    }
    try {
        fill_certificate(cert, problem, ball, *u0, options);
    } catch (const Error& err) {
        if (cert.stage_error.empty()) cert.stage_error = "certificate";
        cert.verdict = Verdict::NotCritical;
        cert.reason = err.what();
    }
    return result;
}

ForcingProbe forcing_threshold_probe(const ProblemSpec& spec_template, const GridFunction& direction, double r,
                                     const RunOptions& options, double s_max, double rel_tol) {
    if (spec_template.family != Family::Nonhomogeneous)
        throw Error(ErrorKind::InvalidArgument, "family: forcing probe needs a nonhomogeneous problem");
    if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "r: must be positive");
    if (!(s_max > 0.0) || !(rel_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "probe bounds must be positive");
    const double dn = l2_norm(direction);
    if (!(dn > 0.0)) throw Error(ErrorKind::InvalidArgument, "f: probe direction must be nonzero");
    const GridFunction unit = (1.0 / dn) * direction;

    ForcingProbe probe;
    auto certified = [&](double s) {
        ProblemSpec spec = spec_template;
        spec.forcing = s * unit;
        spec.radius = r;
        const bool ok = run_problem(spec, options).certificate.verdict == Verdict::Certified;
        probe.evaluations.push_back({s, ok});
        return ok;
    };

    if (!certified(0.0)) throw Error(ErrorKind::Internal, "forcing probe: pipeline fails at zero forcing");
    double lo = 0.0, hi = s_max;
    int doublings = 0;
    while (certified(hi)) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 30) {
            probe.unbounded = true;
            probe.lambda_hat = lo;
            break;
        }
    }
    if (!probe.unbounded) {
        while (hi - lo > rel_tol * hi) {
            const double mid = 0.5 * (lo + hi);
            (certified(mid) ? lo : hi) = mid;
        }
        probe.lambda_hat = lo;
    }
    probe.certified_at_lambda = probe.lambda_hat == 0.0 ? true : certified(probe.lambda_hat);
    probe.certified_at_double = certified(2.0 * probe.lambda_hat);

    for (const auto& a : probe.evaluations)
        for (const auto& b : probe.evaluations)
            if (a.s < b.s && !a.certified && b.certified) probe.non_monotone = true;
    return probe;
}

}  // namespace hintcvx
