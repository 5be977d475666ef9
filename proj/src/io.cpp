#include "hintcvx/io.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

namespace hintcvx {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::InvalidArgument, path + ": " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

/// Rejects keys of `obj` outside `allowed`.
void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(path.empty() ? "config" : path, "expected an object");
    std::set<std::string> names(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items())
        if (!names.count(key)) fail(join(path, key), "unknown key");
}

double number(const json& obj, const std::string& path, const char* key) {
    const json& v = obj.at(key);
    if (!v.is_number()) fail(join(path, key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(join(path, key), "must be finite");
    return x;
}

double number_or(const json& obj, const std::string& path, const char* key, double fallback) {
    return obj.contains(key) ? number(obj, path, key) : fallback;
}

std::int64_t integer(const json& obj, const std::string& path, const char* key) {
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
    return v.get<std::int64_t>();
}

std::size_t count(const json& obj, const std::string& path, const char* key) {
    const auto v = integer(obj, path, key);
    if (v < 0) fail(join(path, key), "must be nonnegative");
    return static_cast<std::size_t>(v);
}

std::string text(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail(join(path, key), "missing");
    const json& v = obj.at(key);
    if (!v.is_string()) fail(join(path, key), "expected a string");
    return v.get<std::string>();
}

bool flag(const json& obj, const std::string& path, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) fail(join(path, key), "expected true or false");
    return obj.at(key).get<bool>();
}

/// Re-raises a validation error with the enclosing path prepended.
template <class F>
void with_prefix(const std::string& prefix, F&& f) {
    try {
        f();
    } catch (const Error& err) {
        if (err.kind() != ErrorKind::InvalidArgument) throw;
        throw Error(ErrorKind::InvalidArgument, prefix + "." + err.what());
    }
}

GridPtr parse_grid(const json& g, const std::string& path) {
    check_keys(g, path, {"kind", "n", "dim", "bc", "m"});
    const std::string kind = text(g, path, "kind");
    GridPtr grid;
    with_prefix(path, [&] {
        if (kind == "radial") {
            if (!g.contains("n")) fail("n", "missing");
            if (g.contains("m")) fail("m", "only valid for square2d grids");
            const auto dim = g.contains("dim") ? integer(g, "", "dim") : 1;
            const auto bc = g.contains("bc") ? parse_boundary_condition(text(g, "", "bc"))
                                             : BoundaryCondition::DirichletZero;
            grid = Grid::radial(count(g, "", "n"), static_cast<int>(dim), bc);
        } else if (kind == "square2d") {
            if (!g.contains("m")) fail("m", "missing");
            if (g.contains("n") || g.contains("dim")) fail(g.contains("n") ? "n" : "dim", "only valid for radial grids");
            if (g.contains("bc") && parse_boundary_condition(text(g, "", "bc")) != BoundaryCondition::DirichletZero)
                fail("bc", "square2d grids are dirichlet-zero");
            grid = Grid::square(count(g, "", "m"));
        } else {
            fail("kind", "expected radial or square2d");
        }
    });
    return grid;
}

/// Lowest Dirichlet mode of the grid (sin(pi x) on the interval, cos(pi r/2)
/// on the ball, sin(pi x) sin(pi y) on the square); 1 for Neumann grids.
GridFunction lowest_mode(const GridPtr& grid) {
    if (!grid->is_radial())
        return GridFunction::sample(grid, [](double x, double y) {
            return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y);
        });
    if (grid->bc() == BoundaryCondition::NeumannZero)
        return GridFunction::sample(grid, [](double) { return 1.0; });
    if (grid->radial_geometry().dim == 1)
        return GridFunction::sample(grid, [](double r) { return std::sin(std::numbers::pi * r); });
    return GridFunction::sample(grid, [](double r) { return std::cos(0.5 * std::numbers::pi * r); });
}

SolverConfig parse_solver(const json& s, const std::string& path) {
    check_keys(s, path, {"max_iters", "step0", "armijo_c", "armijo_shrink", "tol_residual", "tol_gradient", "tol_step",
                         "cg_tol", "cg_max_iters", "seed", "path_nodes", "box_factor"});
    SolverConfig c;
    if (s.contains("max_iters")) c.max_iters = static_cast<int>(integer(s, path, "max_iters"));
    c.step0 = number_or(s, path, "step0", c.step0);
    c.armijo_c = number_or(s, path, "armijo_c", c.armijo_c);
    c.armijo_shrink = number_or(s, path, "armijo_shrink", c.armijo_shrink);
    c.tol_residual = number_or(s, path, "tol_residual", c.tol_residual);
    c.tol_gradient = number_or(s, path, "tol_gradient", c.tol_gradient);
    c.tol_step = number_or(s, path, "tol_step", c.tol_step);
    c.cg_tol = number_or(s, path, "cg_tol", c.cg_tol);
    if (s.contains("cg_max_iters")) c.cg_max_iters = static_cast<int>(integer(s, path, "cg_max_iters"));
    if (s.contains("seed")) c.seed = count(s, path, "seed");
    if (s.contains("path_nodes")) c.path_nodes = static_cast<int>(integer(s, path, "path_nodes"));
    c.box_factor = number_or(s, path, "box_factor", c.box_factor);
    try {
        c.validate();
    } catch (const Error& err) {
        // validate() reports "solver.<field>"
        throw Error(ErrorKind::InvalidArgument, err.what());
    }
    return c;
}

Tolerances parse_tolerances(const json& t, const std::string& path) {
    check_keys(t, path, {"membership", "vi", "strong"});
    Tolerances tol;
    tol.membership = number_or(t, path, "membership", tol.membership);
    tol.vi = number_or(t, path, "vi", tol.vi);
    tol.strong = number_or(t, path, "strong", tol.strong);
    if (!(tol.membership >= 0.0)) fail(join(path, "membership"), "must be >= 0");
    if (!(tol.vi >= 0.0)) fail(join(path, "vi"), "must be >= 0");
    if (!(tol.strong >= 0.0)) fail(join(path, "strong"), "must be >= 0");
    return tol;
}

OutputOptions parse_output(const json& o, const std::string& path) {
    check_keys(o, path, {"dir", "emit"});
    OutputOptions out;
    if (o.contains("dir")) out.dir = text(o, path, "dir");
    if (o.contains("emit")) {
        const std::string ep = join(path, "emit");
        const json& e = o.at("emit");
        check_keys(e, ep, {"certificate", "trace", "profile"});
        out.certificate = flag(e, ep, "certificate", true);
        out.trace = flag(e, ep, "trace", true);
        out.profile = flag(e, ep, "profile", true);
    }
    return out;
}

ProblemSpec parse_problem(const json& p, const std::string& path) {
    check_keys(p, path, {"family", "grid", "p", "q", "mu", "C1", "set", "f", "a"});
    ProblemSpec spec;
    with_prefix(path, [&] { spec.family = parse_family(text(p, "", "family")); });
    if (!p.contains("grid")) fail(join(path, "grid"), "missing");
    spec.grid = parse_grid(p.at("grid"), join(path, "grid"));
    spec.p = number_or(p, path, "p", spec.p);
    spec.C1 = number_or(p, path, "C1", spec.C1);

    const bool cc = spec.family == Family::ConcaveConvex;
    const bool nh = spec.family == Family::Nonhomogeneous;
    const bool nr = spec.family == Family::NeumannRadial;
    auto only = [&](const char* key, bool allowed, const char* family) {
        if (p.contains(key) && !allowed) fail(join(path, key), std::string("only valid for ") + family);
    };
    only("q", cc, "concave-convex");
    only("mu", cc, "concave-convex");
    only("f", nh, "nonhomogeneous");
    only("a", nr, "neumann-radial");

    if (cc) {
        spec.q = number_or(p, path, "q", spec.q);
        if (p.contains("mu") && p.at("mu").is_object()) {
            // {"mu_star_fraction": t} means mu = t * mu*(C1, p, q)
            const std::string mp = join(path, "mu");
            check_keys(p.at("mu"), mp, {"mu_star_fraction"});
            const double t = number(p.at("mu"), mp, "mu_star_fraction");
            if (!(t >= 0.0)) fail(join(mp, "mu_star_fraction"), "must be >= 0");
            with_prefix(path, [&] { spec.mu = t * mu_star(spec.C1, spec.p, spec.q).value; });
        } else {
            spec.mu = number_or(p, path, "mu", 0.0);
        }
    }
    if (nh) {
        spec.forcing = p.contains("f") ? parse_grid_function(p.at("f"), spec.grid, join(path, "f"))
                                       : GridFunction(spec.grid);
    }
    if (nr) {
        spec.weight = p.contains("a") ? parse_grid_function(p.at("a"), spec.grid, join(path, "a"))
                                      : GridFunction::sample(spec.grid, [](double) { return 1.0; });
    }

    if (p.contains("set")) {
        const std::string sp = join(path, "set");
        const json& s = p.at("set");
        check_keys(s, sp, {"kind", "r"});
        const std::string kind = text(s, sp, "kind");
        if (kind == "h2ball") {
            if (nr) fail(join(sp, "kind"), "neumann-radial works over monotone-cone");
            if (s.contains("r")) spec.radius = number(s, sp, "r");
        } else if (kind == "monotone-cone") {
            if (!nr) fail(join(sp, "kind"), "ball families work over h2ball");
            if (s.contains("r")) fail(join(sp, "r"), "monotone-cone takes no radius");
        } else {
            fail(join(sp, "kind"), "expected h2ball or monotone-cone");
        }
    }
    with_prefix(path, [&] { spec.validate(); });
    return spec;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::ofstream open_output(const std::filesystem::path& file) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + file.string());
    out << std::setprecision(17);
    return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

GridFunction parse_grid_function(const json& entry, const GridPtr& grid, const std::string& path) {
    if (!entry.is_object()) fail(path, "expected an object");
    const std::string kind = text(entry, path, "kind");
    if (kind == "sine") {
        check_keys(entry, path, {"kind", "amplitude"});
        return number_or(entry, path, "amplitude", 1.0) * lowest_mode(grid);
    }
    if (kind == "normalized-sine") {
        check_keys(entry, path, {"kind", "norm"});
        const GridFunction mode = lowest_mode(grid);
        return (number_or(entry, path, "norm", 1.0) / l2_norm(mode)) * mode;
    }
    if (kind == "constant") {
        check_keys(entry, path, {"kind", "value"});
        const double c = number(entry, path, "value");
        if (grid->is_radial()) return GridFunction::sample(grid, [c](double) { return c; });
        return GridFunction::sample(grid, [c](double, double) { return c; });
    }
    if (kind == "affine") {
        check_keys(entry, path, {"kind", "a0", "a1"});
        if (!grid->is_radial()) fail(join(path, "kind"), "affine profiles need a radial grid");
        const double a0 = number_or(entry, path, "a0", 0.0);
        const double a1 = number_or(entry, path, "a1", 0.0);
        return GridFunction::sample(grid, [a0, a1](double r) { return a0 + a1 * r; });
    }
    if (kind == "values") {
        check_keys(entry, path, {"kind", "values"});
        const json& v = entry.contains("values") ? entry.at("values") : json();
        if (!v.is_array()) fail(join(path, "values"), "expected an array");
        if (v.size() != grid->size())
            fail(join(path, "values"), "expected " + std::to_string(grid->size()) + " entries");
        Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) fail(join(path, "values") + "[" + std::to_string(i) + "]", "expected a number");
            x[static_cast<Eigen::Index>(i)] = v[i].get<double>();
        }
        GridFunction out(grid);
        with_prefix(path, [&] { out = GridFunction(grid, std::move(x)); });
        return out;
    }
    fail(join(path, "kind"), "expected sine, normalized-sine, constant, affine or values");
}

RunConfig parse_run_config(const json& doc) {
    check_keys(doc, "", {"schema", "problem", "solver", "tolerances", "output"});
    if (!doc.contains("schema")) fail("schema", "missing (expected \"" + std::string(kConfigSchema) + "\")");
    if (text(doc, "", "schema") != kConfigSchema) fail("schema", "unsupported version, expected " + std::string(kConfigSchema));
    if (!doc.contains("problem")) fail("problem", "missing");
    RunConfig cfg{parse_problem(doc.at("problem"), "problem"), {}, {}};
    if (doc.contains("solver")) cfg.options.solver = parse_solver(doc.at("solver"), "solver");
    if (doc.contains("tolerances")) cfg.options.tol = parse_tolerances(doc.at("tolerances"), "tolerances");
    if (doc.contains("output")) cfg.output = parse_output(doc.at("output"), "output");
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidArgument, "config: cannot read " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& err) {
        throw Error(ErrorKind::InvalidArgument, std::string("config: malformed JSON: ") + err.what());
    }
    return parse_run_config(doc);
}

json grid_to_json(const Grid& grid) {
    json g;
    if (grid.is_radial()) {
        const auto& r = grid.radial_geometry();
        g = {{"kind", "radial"}, {"n", r.n}, {"dim", r.dim}, {"h", r.h}};
    } else {
        const auto& s = grid.square_geometry();
        g = {{"kind", "square2d"}, {"m", s.m}, {"h", s.h}};
    }
    g["bc"] = std::string(to_string(grid.bc()));
    return g;
}

json certificate_to_json(const Certificate& c) {
    json j;
    j["problem"] = c.problem;
    j["verdict"] = std::string(to_string(c.verdict));
    j["reason"] = c.reason;
    j["stage_error"] = c.stage_error.empty() ? json(nullptr) : json(c.stage_error);
    j["vi_residual"] = c.vi_residual;
    j["box_bound"] = c.box_bound;
    j["strong_residual"] = c.strong_residual;
    j["v0_in_K"] = c.v0_in_K;
    j["eq10_defect"] = c.eq10_defect;
    j["duality_gap"] = c.duality_gap;
    j["u0_v0_energy_distance"] = c.u0_v0_energy_distance;
    j["energy"] = c.energy;
    j["window"] = c.window ? json{{"r1", c.window->r1}, {"r2", c.window->r2}} : json{{"r1", nullptr}, {"r2", nullptr}};
    j["radius"] = optional_number(c.radius);
    j["norms"] = {{"u0_h2", c.u0_h2_norm}, {"v0_h2", c.v0_h2_norm}};
    j["regularity_chain"] = {{"lhs", c.chain_lhs}, {"rhs", c.chain_rhs}};
    if (c.problem == "neumann-radial") {
        j["mountain_pass_level"] = optional_number(c.mountain_pass_level);
        j["min_u0"] = optional_number(c.min_u0);
        j["monotonicity_defects"] = c.monotonicity_defects ? json(*c.monotonicity_defects) : json(nullptr);
    }
    if (c.u0) j["grid"] = grid_to_json(c.u0->grid());
    j["timestamp"] = utc_timestamp();
    return j;
}

void write_certificate(const std::filesystem::path& file, const Certificate& cert) {
    auto out = open_output(file);
    out << certificate_to_json(cert).dump(2) << '\n';
}

void write_trace_csv(const std::filesystem::path& file, const IterTrace& trace) {
    auto out = open_output(file);
    out << "k,energy,vi_residual,step,h2_norm\n";
    for (const auto& r : trace.records)
        out << r.k << ',' << r.energy << ',' << r.vi_residual << ',' << r.step << ',' << r.h2_norm << '\n';
}

void write_profile_csv(const std::filesystem::path& file, const Certificate& cert) {
    auto out = open_output(file);
    if (!cert.u0) {
        out << "coord,u0,v0\n";
        return;
    }
    const Grid& grid = cert.u0->grid();
    const auto& u = cert.u0->values();
    const bool have_v = cert.v0.has_value();
    auto v = [&](std::size_t i) { return have_v ? cert.v0->values()[static_cast<Eigen::Index>(i)] : std::nan(""); };
    if (grid.is_radial()) {
        out << "coord,u0,v0\n";
        for (std::size_t i = 0; i < grid.size(); ++i)
            out << grid.radial_geometry().node(i) << ',' << u[static_cast<Eigen::Index>(i)] << ',' << v(i) << '\n';
    } else {
        const auto& sq = grid.square_geometry();
        out << "x,y,u0,v0\n";
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const auto [i, j] = sq.cell(k);
            out << sq.coord(i) << ',' << sq.coord(j) << ',' << u[static_cast<Eigen::Index>(k)] << ',' << v(k) << '\n';
        }
    }
}

void write_grid_function_csv(const std::filesystem::path& file, const GridFunction& u) {
    auto out = open_output(file);
    const Grid& grid = u.grid();
    if (grid.is_radial()) {
        out << "coord,value\n";
        for (std::size_t i = 0; i < grid.size(); ++i)
            out << grid.radial_geometry().node(i) << ',' << u.values()[static_cast<Eigen::Index>(i)] << '\n';
    } else {
        const auto& sq = grid.square_geometry();
        out << "x,y,value\n";
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const auto [i, j] = sq.cell(k);
            out << sq.coord(i) << ',' << sq.coord(j) << ',' << u.values()[static_cast<Eigen::Index>(k)] << '\n';
        }
    }
}

}  // namespace hintcvx
