#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hintcvx/io.hpp"
#include "hintcvx/log.hpp"

using namespace hintcvx;
using nlohmann::json;

namespace {

constexpr int kExitCertified = 0;
constexpr int kExitError = 1;
constexpr int kExitNotCertified = 2;

struct SolveArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
};

struct WindowArgs {
    double C1 = 1.0;
    double mu = 0.0;
    double p = 4.0;
    double q = 1.5;
};

struct ProbeArgs {
    std::string config;
    std::string direction = "config";
    std::optional<double> r;
    std::optional<std::uint64_t> seed;
    double s_max = 1.0;
    double rel_tol = 1e-3;
};

int cmd_solve(const SolveArgs& args) {
    RunConfig cfg = load_run_config(args.config);
    if (!args.out.empty()) cfg.output.dir = args.out;
    if (args.seed) cfg.options.solver.seed = *args.seed;
    spdlog::info("solving {} on {}", to_string(cfg.problem.family), cfg.problem.grid->describe());

    const RunResult result = run_problem(cfg.problem, cfg.options);
    const Certificate& cert = result.certificate;
    const auto& dir = cfg.output.dir;
    if (cfg.output.certificate) write_certificate(dir / "certificate.json", cert);
    if (cfg.output.trace) write_trace_csv(dir / "trace.csv", result.report.trace);
    if (cfg.output.profile) write_profile_csv(dir / "profile.csv", cert);
    spdlog::debug("{} iterations, stop: {}", result.report.trace.records.size(), result.report.trace.stop_reason);

    std::cout << "verdict: " << to_string(cert.verdict) << "\n"
              << "vi_residual: " << cert.vi_residual << "\n"
              << "strong_residual: " << cert.strong_residual << "\n"
              << "energy: " << cert.energy << "\n";
    if (!cert.stage_error.empty()) {
        std::cerr << "error [" << cert.stage_error << "]: " << cert.reason << "\n";
        return kExitError;
    }
    if (cert.verdict != Verdict::Certified) {
        spdlog::info("not certified: {}", cert.reason);
        return kExitNotCertified;
    }
    return kExitCertified;
}

int cmd_window(const WindowArgs& args) {
    const auto window = radius_window(args.C1, args.mu, args.p, args.q);
    const MuStar ms = mu_star(args.C1, args.p, args.q);
    json j;
    j["r1"] = window ? json(window->r1) : json(nullptr);
    j["r2"] = window ? json(window->r2) : json(nullptr);
    j["mu_star"] = ms.value;
    if (ms.degenerate) j["mu_star_degenerate"] = true;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_probe(const ProbeArgs& args) {
    RunConfig cfg = load_run_config(args.config);
    if (args.seed) cfg.options.solver.seed = *args.seed;
    if (cfg.problem.family != Family::Nonhomogeneous)
        throw Error(ErrorKind::InvalidArgument, "problem.family: probe-lambda needs a nonhomogeneous config");

    GridFunction direction(cfg.problem.grid);
    if (args.direction == "config")
        direction = *cfg.problem.forcing;
    else
        direction = parse_grid_function(json{{"kind", args.direction}}, cfg.problem.grid, "--direction");
    if (!(l2_norm(direction) > 0.0)) direction = parse_grid_function(json{{"kind", "normalized-sine"}}, cfg.problem.grid, "--direction");

    double r = 0.0;
    if (args.r)
        r = *args.r;
    else if (cfg.problem.radius)
        r = *cfg.problem.radius;
    else
        r = default_radius(*forcing_radius_window(cfg.problem.C1, cfg.problem.p, 0.0));

    const ForcingProbe probe = forcing_threshold_probe(cfg.problem, direction, r, cfg.options, args.s_max, args.rel_tol);
    json evals = json::array();
    for (const auto& e : probe.evaluations) evals.push_back({{"s", e.s}, {"certified", e.certified}});
    json j{{"r", r},
           {"lambda_hat", probe.lambda_hat},
           {"certified_at_lambda", probe.certified_at_lambda},
           {"certified_at_double", probe.certified_at_double},
           {"non_monotone", probe.non_monotone},
           {"unbounded", probe.unbounded},
           {"evaluations", evals}};
    std::cout << j.dump(2) << "\n";
    if (probe.non_monotone) spdlog::warn("certification flipped non-monotonically in s");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();
    CLI::App app{"Critical points of constrained energies: solve, certify, and probe admissibility windows"};
    app.require_subcommand(1);

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "run the pipeline on a config and write certificate.json, trace.csv, profile.csv");
    s->add_option("--config", solve.config, "configuration file")->required()->check(CLI::ExistingFile);
    s->add_option("--out", solve.out, "output directory (overrides output.dir)");
    s->add_option("--seed", solve.seed, "solver seed");

    WindowArgs window;
    auto* w = app.add_subcommand("window", "print the radius window and mu*");
    w->add_option("--C1", window.C1, "regularity constant")->capture_default_str();
    w->add_option("--mu", window.mu, "sublinear coefficient")->capture_default_str();
    w->add_option("--p", window.p, "superlinear exponent")->capture_default_str();
    w->add_option("--q", window.q, "sublinear exponent")->capture_default_str();

    ProbeArgs probe;
    auto* pl = app.add_subcommand("probe-lambda", "bisect the largest certified forcing amplitude");
    pl->add_option("--config", probe.config, "nonhomogeneous configuration file")->required()->check(CLI::ExistingFile);
    pl->add_option("--direction", probe.direction, "forcing direction: config, sine, normalized-sine or constant")
        ->capture_default_str();
    pl->add_option("--r", probe.r, "constraint radius (default: config value or window midpoint)");
    pl->add_option("--seed", probe.seed, "solver seed");
    pl->add_option("--s-max", probe.s_max, "initial upper amplitude")->capture_default_str();
    pl->add_option("--rel-tol", probe.rel_tol, "relative bisection tolerance")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (*s) return cmd_solve(solve);
        if (*w) return cmd_window(window);
        if (*pl) return cmd_probe(probe);
    } catch (const Error& err) {
        std::cerr << "error [" << to_string(err.kind()) << "]: " << err.what() << "\n";
        return kExitError;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
