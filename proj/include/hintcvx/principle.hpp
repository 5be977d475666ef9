#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hintcvx/convex_analysis.hpp"
#include "hintcvx/solvers.hpp"

namespace hintcvx {

/// Certification thresholds. The strong residual inherits discretisation
/// error, membership and the VI residual do not.
struct Tolerances {
    double membership = 1e-9;
    double vi = 1e-9;
    double strong = 1e-6;
};

struct RunOptions {
    SolverConfig solver;
    Tolerances tol;
};

enum class Verdict { Certified, StepIIFailed, NotCritical };

std::string_view to_string(Verdict v);

struct RadiusWindow {
    double r1 = 0.0;
    double r2 = 0.0;
};

/// { r > 0 : C1 r^{p-1} + C1 mu r^{q-1} <= r } as [r1, r2], or nullopt when
/// empty. For mu = 0 the window is (0, r2] and r1 is reported as 0.
std::optional<RadiusWindow> radius_window(double C1, double mu, double p, double q);

/// Same inequality for the forced problem: C1 (r^{p-1} + ||f||) <= r.
std::optional<RadiusWindow> forcing_radius_window(double C1, double p, double forcing_norm);

struct MuStar {
    double value = 0.0;
    double argmax = 0.0;
    bool degenerate = false;  // maximand never positive
};

/// mu* = max_r (r - C1 r^{p-1}) / (C1 r^{q-1}).
MuStar mu_star(double C1, double p, double q);

/// Log-scale midpoint of the window, or r2/2 when r1 = 0.
double default_radius(const RadiusWindow& w);

struct StepIIResult {
    GridFunction v0;
    bool in_K = false;
    Norms v0_norms;
    /// ||v0||_h2 and the a-priori bound C1(||u0||^{p-1} + ...) it is compared with.
    double chain_lhs = 0.0;
    double chain_rhs = 0.0;
};

/// Solves DΨ(v0) = DΦ(u0) and checks v0 in K.
StepIIResult step_ii_verify(const Problem& problem, const ConvexSet& set, const GridFunction& u0,
                            const RunOptions& options);

struct Certificate {
    std::string problem;
    Verdict verdict = Verdict::NotCritical;
    std::string reason;
    /// Stage whose error aborted the run ("step-i", "step-ii"); empty if none.
    std::string stage_error;

    std::optional<GridFunction> u0;
    std::optional<GridFunction> v0;
    double vi_residual = std::numeric_limits<double>::quiet_NaN();
    double box_bound = 0.0;
    bool v0_in_K = false;
    double u0_h2_norm = std::numeric_limits<double>::quiet_NaN();
    double v0_h2_norm = std::numeric_limits<double>::quiet_NaN();
    double strong_residual = std::numeric_limits<double>::quiet_NaN();
    double eq10_defect = std::numeric_limits<double>::quiet_NaN();
    double duality_gap = std::numeric_limits<double>::quiet_NaN();
    double u0_v0_energy_distance = std::numeric_limits<double>::quiet_NaN();  // ||u0 - v0||_A
    double energy = std::numeric_limits<double>::quiet_NaN();
    double chain_lhs = std::numeric_limits<double>::quiet_NaN();
    double chain_rhs = std::numeric_limits<double>::quiet_NaN();

    std::optional<RadiusWindow> window;
    std::optional<double> radius;

    // neumann-radial extras
    std::optional<double> mountain_pass_level;
    std::optional<double> min_u0;
    std::optional<std::size_t> monotonicity_defects;
};

struct SolverReport {
    IterTrace trace;
    std::string method;
};

struct RunResult {
    Certificate certificate;
    SolverReport report;
};

/// Step (i), step (ii) and the certificate for one validated problem.
RunResult run_problem(const ProblemSpec& spec, const RunOptions& options);

struct ProbeEvaluation {
    double s = 0.0;
    bool certified = false;
};

struct ForcingProbe {
    double lambda_hat = 0.0;
    bool certified_at_lambda = false;
    bool certified_at_double = false;
    bool non_monotone = false;
    bool unbounded = false;  // still certified at the largest amplitude tried
    std::vector<ProbeEvaluation> evaluations;
};

/// Largest s for which the pipeline certifies with f = s * f_dir / ||f_dir||.
ForcingProbe forcing_threshold_probe(const ProblemSpec& spec_template, const GridFunction& direction, double r,
                                     const RunOptions& options, double s_max = 1.0, double rel_tol = 1e-3);

}  // namespace hintcvx
