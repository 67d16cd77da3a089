/// Command-line front end: configuration parsing, subcommand dispatch, and
/// artifact emission (JSON manifests plus CSV boundary curves).
///
/// Subcommands
///   identities                 run the special-function / quadrature identity battery
///   green eval                 evaluate G, its regular part, and gradients at a point pair
///   equilibrium {ring,check,find}   point-vortex equilibria (build / verify / refine)
///   patch {solve,continue,multi}    contour-dynamics patch solves
///
/// Configuration comes from an optional JSON file (--config) overlaid by
/// command-line flags; flags win. The output directory resolves as
/// --out > $VORTEX_OUTPUT_DIR > config "output_dir" > current directory.
///
/// Exit codes: 0 ok, 2 config fault, 3 numerical failure, 4 identity failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "vortex/green.hpp"
#include "vortex/identities.hpp"
#include "vortex/point_vortex.hpp"
#include "vortex/solver.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vortex;

constexpr const char* version_string = "1.0.0";

constexpr int exit_config_fault = 2;
constexpr int exit_numerical = 3;
constexpr int exit_identity = 4;

/// Effective run configuration. Fields with no universal default stay empty
/// until a config file or flag supplies them; per-command resolution fills the
/// remaining geometric defaults (d = pi/N, h = height/2, gamma = N pi).
struct RunConfig {
    double rho = 0.3;
    int N = 3;
    std::optional<double> d;      ///< ring offset, default pi/N
    std::optional<double> h;      ///< ring height, default -log(rho)/2
    std::optional<double> gamma;  ///< background circulation, default N pi
    double eps = 0.05;
    std::optional<std::vector<double>> eps_grid;       ///< default default_eps_grid()
    std::optional<std::vector<double>> circulations;   ///< default depends on command
    std::optional<std::vector<TorusPoint>> centers;    ///< config-file only
    std::optional<std::array<double, 2>> x, y;         ///< green eval points
    double tol_residual = 1e-10;
    double tol_equilibrium = 1e-10;
    std::optional<double> identity_tolerance;  ///< override for every identity check
    int max_newton = 50;
    int M = 256;
    int J = 32;
    int k = 3;
    double fd_step = 1e-6;
    std::string output_dir = ".";
};

/// Flag values; std::nullopt / empty means "not passed", so config-file values
/// survive unless explicitly overridden.
struct Flags {
    std::optional<double> rho, d, h, gamma, eps, tol_residual, tol_equilibrium,
        identity_tolerance, fd_step, x1, x2, y1, y2;
    std::optional<int> N, M, J, k, max_newton;
    std::vector<double> eps_grid, circulations;
};

json json_pair(double a, double b) { return json::array({a, b}); }

void apply_config_json(const json& j, RunConfig& cfg) {
    if (!j.is_object()) throw config_error("config file: top level must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "rho") cfg.rho = value.get<double>();
        else if (key == "N") cfg.N = value.get<int>();
        else if (key == "d") cfg.d = value.get<double>();
        else if (key == "h") cfg.h = value.get<double>();
        else if (key == "gamma") cfg.gamma = value.get<double>();
        else if (key == "eps") cfg.eps = value.get<double>();
        else if (key == "eps_grid") cfg.eps_grid = value.get<std::vector<double>>();
        else if (key == "circulations") cfg.circulations = value.get<std::vector<double>>();
        else if (key == "centers") {
            std::vector<TorusPoint> pts;
            if (!value.is_array()) throw config_error("config: centers must be an array of [x1,x2] pairs");
            for (const auto& row : value) {
                if (!row.is_array() || row.size() != 2)
                    throw config_error("config: centers must be an array of [x1,x2] pairs");
                pts.push_back({row[0].get<double>(), row[1].get<double>()});
            }
            cfg.centers = std::move(pts);
        } else if (key == "x" || key == "y") {
            if (!value.is_array() || value.size() != 2)
                throw config_error("config: " + key + " must be a [x1,x2] pair");
            std::array<double, 2> p{value[0].get<double>(), value[1].get<double>()};
            (key == "x" ? cfg.x : cfg.y) = p;
        } else if (key == "tol_residual") cfg.tol_residual = value.get<double>();
        else if (key == "tol_equilibrium") cfg.tol_equilibrium = value.get<double>();
        else if (key == "identity_tolerance") cfg.identity_tolerance = value.get<double>();
        else if (key == "max_newton") cfg.max_newton = value.get<int>();
        else if (key == "M") cfg.M = value.get<int>();
        else if (key == "J") cfg.J = value.get<int>();
        else if (key == "k") cfg.k = value.get<int>();
        else if (key == "fd_step") cfg.fd_step = value.get<double>();
        else if (key == "output_dir") cfg.output_dir = value.get<std::string>();
        else throw config_error("config: unknown field \"" + key + "\"");
    }
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw config_error("config parse (" + path + "): " + e.what());
    }
    RunConfig cfg;
    try {
        apply_config_json(j, cfg);
    } catch (const json::exception& e) {
        throw config_error("config (" + path + "): " + e.what());
    }
    return cfg;
}

void overlay_flags(RunConfig& cfg, const Flags& f) {
    if (f.rho) cfg.rho = *f.rho;
    if (f.N) cfg.N = *f.N;
    if (f.d) cfg.d = *f.d;
    if (f.h) cfg.h = *f.h;
    if (f.gamma) cfg.gamma = *f.gamma;
    if (f.eps) cfg.eps = *f.eps;
    if (!f.eps_grid.empty()) cfg.eps_grid = f.eps_grid;
    if (!f.circulations.empty()) cfg.circulations = f.circulations;
    if (f.tol_residual) cfg.tol_residual = *f.tol_residual;
    if (f.tol_equilibrium) cfg.tol_equilibrium = *f.tol_equilibrium;
    if (f.identity_tolerance) cfg.identity_tolerance = *f.identity_tolerance;
    if (f.max_newton) cfg.max_newton = *f.max_newton;
    if (f.M) cfg.M = *f.M;
    if (f.J) cfg.J = *f.J;
    if (f.k) cfg.k = *f.k;
    if (f.fd_step) cfg.fd_step = *f.fd_step;
    if (f.x1 || f.x2) {
        std::array<double, 2> p = cfg.x.value_or(std::array<double, 2>{0.0, 0.0});
        if (f.x1) p[0] = *f.x1;
        if (f.x2) p[1] = *f.x2;
        cfg.x = p;
    }
    if (f.y1 || f.y2) {
        std::array<double, 2> p = cfg.y.value_or(std::array<double, 2>{0.0, 0.0});
        if (f.y1) p[0] = *f.y1;
        if (f.y2) p[1] = *f.y2;
        cfg.y = p;
    }
}

fs::path resolve_output_dir(const std::optional<std::string>& flag, const RunConfig& cfg) {
    if (flag) return *flag;
    if (const char* env = std::getenv("VORTEX_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
    return cfg.output_dir;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open for writing: " + path.string());
    out << text;
    out.flush();
    if (!out) throw config_error("write failed: " + path.string());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

SolveSettings settings_from(const RunConfig& cfg) {
    SolveSettings s;
    s.tol_residual = cfg.tol_residual;
    s.max_newton = cfg.max_newton;
    s.M = cfg.M;
    s.J = cfg.J;
    s.k = cfg.k;
    s.fd_step = cfg.fd_step;
    if (cfg.eps_grid) s.eps_grid = *cfg.eps_grid;
    return s;
}

json settings_echo(const SolveSettings& s) {
    return json{{"M", s.M},
                {"J", s.J},
                {"k", s.k},
                {"tol_residual", s.tol_residual},
                {"max_newton", s.max_newton},
                {"fd_step", s.fd_step}};
}

json curve_json(const FourierCurve& u) {
    return json{{"mean", u.mean},
                {"cos", u.cos_coeffs},
                {"sin", u.sin_coeffs},
                {"grid_size", u.grid_size}};
}

/// Boundary CSV per the column contract `s,x1,x2,R`: grid parameters
/// s_i = 2 pi i / M in [0, 2 pi), boundary point x = center + R (cos s, sin s)
/// with physical radius R(s) = eps (1 + eps u(s)); 17 significant digits.
std::string boundary_csv(const FourierCurve& u, double eps, TorusPoint center) {
    const int M = u.grid_size;
    std::string out = "s,x1,x2,R\n";
    char buf[160];
    for (int i = 0; i < M; ++i) {
        const double s = two_pi * i / M;
        const double r = eps * (1.0 + eps * synthesize(u, s));
        const double b1 = center.x1 + r * std::cos(s);
        const double b2 = center.x2 + r * std::sin(s);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", s, b1, b2, r);
        out += buf;
    }
    return out;
}

json centers_json(const std::vector<TorusPoint>& centers) {
    json arr = json::array();
    for (const TorusPoint& c : centers) arr.push_back(json_pair(c.x1, c.x2));
    return arr;
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_identities(const RunConfig& cfg, const fs::path& outdir) {
    std::vector<IdentityCheck> checks = identity_battery(cfg.rho);
    if (cfg.identity_tolerance)
        for (IdentityCheck& c : checks) {
            c.tolerance = *cfg.identity_tolerance;
            c.pass = c.max_error <= c.tolerance;
        }
    bool all_pass = true;
    json arr = json::array();
    for (const IdentityCheck& c : checks) {
        all_pass = all_pass && c.pass;
        arr.push_back(json{{"identity", c.name},
                           {"max_error", c.max_error},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass}});
        std::printf("%-46s max error %9.3e  %s\n", c.name.c_str(), c.max_error,
                    c.pass ? "pass" : "FAIL");
    }
    json config_echo{{"rho", cfg.rho}};
    if (cfg.identity_tolerance) config_echo["identity_tolerance"] = *cfg.identity_tolerance;
    json report{{"version", version_string},
                {"config", config_echo},
                {"checks", arr},
                {"all_pass", all_pass}};
    const fs::path file = outdir / "identities.json";
    write_file(file, dump(report));
    std::printf("wrote %s\n", file.string().c_str());
    return all_pass ? 0 : exit_identity;
}

int cmd_green_eval(const RunConfig& cfg, const fs::path& outdir) {
    if (!cfg.x || !cfg.y)
        throw config_error(
            "green eval: missing required evaluation points (flags --x1 --x2 --y1 --y2 "
            "or config arrays \"x\" and \"y\")");
    const TorusGeometry geom(cfg.rho);
    const TorusPoint x{(*cfg.x)[0], (*cfg.x)[1]};
    const TorusPoint y{(*cfg.y)[0], (*cfg.y)[1]};
    const double g = green_eval(x, y, geom);
    const double reg = regular_part_H(x, y, geom);
    const Vec2 g1 = grad_H(x, y, geom, Which::first);
    const Vec2 g2 = grad_H(x, y, geom, Which::second);
    json out{{"version", version_string},
             {"config", json{{"rho", cfg.rho},
                             {"x", json_pair(x.x1, x.x2)},
                             {"y", json_pair(y.x1, y.x2)}}},
             {"green", g},
             {"regular_part", reg},
             {"grad_regular_part_x", json_pair(g1.x, g1.y)},
             {"grad_regular_part_y", json_pair(g2.x, g2.y)},
             {"robin_constant", robin_constant(cfg.rho)}};
    const fs::path file = outdir / "green.json";
    write_file(file, dump(out));
    std::printf("G(x,y)  = %.17g\nH(x,y)  = %.17g\nwrote %s\n", g, reg, file.string().c_str());
    return 0;
}

int cmd_equilibrium(const std::string& mode, RunConfig cfg, const fs::path& outdir) {
    const TorusGeometry geom(cfg.rho);
    VortexConfiguration vc{{}, {}, geom};
    json config_echo{{"rho", cfg.rho}};

    if (mode == "ring") {
        const double d = cfg.d.value_or(pi / cfg.N);
        const double h = cfg.h.value_or(0.5 * geom.height);
        vc = ring_configuration(cfg.N, d, h, geom);
        if (cfg.circulations) {
            if (static_cast<int>(cfg.circulations->size()) != cfg.N)
                throw config_error("equilibrium ring: need exactly N circulations");
            vc.circulations = *cfg.circulations;
        }
        config_echo["N"] = cfg.N;
        config_echo["d"] = d;
        config_echo["h"] = h;
    } else {
        if (!cfg.centers)
            throw config_error("equilibrium " + mode +
                               ": missing required field \"centers\" (config file only)");
        vc.centers = *cfg.centers;
        const std::size_t n = vc.centers.size();
        if (cfg.circulations) {
            if (cfg.circulations->size() != n)
                throw config_error("equilibrium " + mode +
                                   ": circulations must match the number of centers");
            vc.circulations = *cfg.circulations;
        } else {
            vc.circulations.assign(n, 1.0);
        }
        config_echo["centers"] = centers_json(vc.centers);
    }
    config_echo["circulations"] = vc.circulations;

    json out{{"version", version_string}};
    if (mode == "find") {
        config_echo["tol_equilibrium"] = cfg.tol_equilibrium;
        out["seed_centers"] = centers_json(vc.centers);
        vc = find_equilibrium(vc, cfg.tol_equilibrium);
    }
    const EquilibriumReport rep = make_equilibrium_report(vc);

    json residuals = json::array();
    for (const std::complex<double>& f : rep.residuals) residuals.push_back(json_pair(f.real(), f.imag()));
    out["config"] = config_echo;
    out["centers"] = centers_json(vc.centers);
    out["circulations"] = vc.circulations;
    out["residuals"] = residuals;
    out["max_abs_residual"] = rep.max_abs;
    out["centralized"] = rep.centralized;
    out["hessian_rank"] = rep.hessian_rank;

    const fs::path file = outdir / "equilibrium.json";
    write_file(file, dump(out));
    std::printf("N = %zu  max |f_m| = %.3e  hessian rank %d  centralized %s\nwrote %s\n",
                vc.centers.size(), rep.max_abs, rep.hessian_rank,
                rep.centralized ? "yes" : "no", file.string().c_str());
    return 0;
}

/// Ring lattice of the single-layer problem: centers (d + 2 pi n / N, h).
std::vector<TorusPoint> single_layer_centers(const SingleLayerProblem& p) {
    std::vector<TorusPoint> out;
    for (int n = 0; n < p.patches; ++n) out.push_back({p.d + two_pi * n / p.patches, p.h});
    return out;
}

int cmd_patch_solve(RunConfig cfg, const fs::path& outdir) {
    const TorusGeometry geom(cfg.rho);
    const double d = cfg.d.value_or(pi / cfg.N);
    const double h = cfg.h.value_or(0.5 * geom.height);
    const double gamma0 = cfg.gamma.value_or(cfg.N * pi);
    const SingleLayerProblem p{cfg.N, d, h, gamma0, cfg.eps, geom};
    const SolveSettings st = settings_from(cfg);

    const SingleSolution sol = solve_single(p, st);
    const std::vector<TorusPoint> centers = single_layer_centers(p);

    json config_echo{{"rho", cfg.rho}, {"N", cfg.N}, {"d", d}, {"h", h},
                     {"gamma", gamma0}, {"eps", cfg.eps}};
    config_echo.update(settings_echo(st));

    json result{{"gamma", sol.gamma},
                {"newton_iterations", sol.newton_iterations},
                {"residual_norm", sol.residual_norm},
                {"curve", curve_json(sol.u)},
                {"centers", centers_json(centers)}};
    if (cfg.eps != 0.0) {
        result["min_scaled_curvature"] = min_scaled_curvature(sol.u, std::abs(cfg.eps));
        result["decay_rate"] = decay_diagnostic(sol.u);  // null when the fit lacks points
    }

    json files = json::array();
    for (std::size_t n = 0; n < centers.size(); ++n) {
        char name[64];
        std::snprintf(name, sizeof name, "boundary_patch%zu.csv", n);
        write_file(outdir / name, boundary_csv(sol.u, cfg.eps, centers[n]));
        files.push_back(name);
    }
    result["files"] = files;

    json manifest{{"version", version_string}, {"config", config_echo}, {"result", result}};
    const fs::path file = outdir / "manifest.json";
    write_file(file, dump(manifest));
    std::printf("gamma = %.12f  (gamma - N pi = %.6e)\nresidual = %.3e in %d Newton steps\nwrote %s\n",
                sol.gamma, sol.gamma - cfg.N * pi, sol.residual_norm, sol.newton_iterations,
                file.string().c_str());
    return 0;
}

int cmd_patch_continue(RunConfig cfg, const fs::path& outdir) {
    const TorusGeometry geom(cfg.rho);
    const double d = cfg.d.value_or(pi / cfg.N);
    const double h = cfg.h.value_or(0.5 * geom.height);
    const double gamma0 = cfg.gamma.value_or(cfg.N * pi);
    const SingleLayerProblem p{cfg.N, d, h, gamma0, 0.0, geom};
    const SolveSettings st = settings_from(cfg);

    const ContinuationRun run = continue_in_eps(p, st);
    const std::vector<TorusPoint> centers = single_layer_centers(p);

    json config_echo{{"rho", cfg.rho}, {"N", cfg.N}, {"d", d}, {"h", h}, {"gamma", gamma0},
                     {"eps_grid", st.eps_grid}};
    config_echo.update(settings_echo(st));

    json states = json::array();
    for (std::size_t i = 0; i < run.states.size(); ++i) {
        const ContinuationState& s = run.states[i];
        char name[64];
        std::snprintf(name, sizeof name, "boundary_eps%02zu.csv", i);
        write_file(outdir / name, boundary_csv(s.curves.at(0), s.eps, centers.at(0)));
        states.push_back(json{{"eps", s.eps},
                              {"gamma", s.gamma},
                              {"residual_norm", s.residual_norm},
                              {"newton_iterations", s.newton_iterations},
                              {"min_scaled_curvature", s.min_curvature},
                              {"decay_rate", s.decay_rate},  // null when unresolved
                              {"curve", curve_json(s.curves.at(0))},
                              {"file", name}});
    }
    json manifest{{"version", version_string},
                  {"config", config_echo},
                  {"states", states},
                  {"failed", run.failed}};
    if (run.failed) {
        manifest["failure_eps"] = run.failure_eps;
        manifest["failure"] = run.failure;
    }
    const fs::path file = outdir / "continuation.json";
    write_file(file, dump(manifest));
    std::printf("accepted %zu/%zu states\nwrote %s\n", run.states.size(), st.eps_grid.size(),
                file.string().c_str());
    if (run.failed) {
        std::fprintf(stderr, "error: continuation stopped at eps = %g: %s\n", run.failure_eps,
                     run.failure.c_str());
        return exit_numerical;
    }
    return 0;
}

int cmd_patch_multi(RunConfig cfg, const fs::path& outdir) {
    const TorusGeometry geom(cfg.rho);
    std::vector<TorusPoint> centers;
    if (cfg.centers) {
        centers = *cfg.centers;
    } else {
        const double d = cfg.d.value_or(pi / cfg.N);
        const double h = cfg.h.value_or(0.5 * geom.height);
        centers = ring_configuration(cfg.N, d, h, geom).centers;
    }
    const std::size_t n = centers.size();
    std::vector<double> circulations;
    if (cfg.circulations) {
        if (cfg.circulations->size() != n)
            throw config_error("patch multi: circulations must match the number of centers");
        circulations = *cfg.circulations;
    } else {
        circulations.assign(n, pi);
    }
    const MultiPatchProblem p{centers, circulations, cfg.eps, geom};
    const SolveSettings st = settings_from(cfg);

    const MultiSolution sol = solve_multi(p, st);

    json config_echo{{"rho", cfg.rho}, {"eps", cfg.eps},
                     {"centers", centers_json(centers)}, {"circulations", circulations}};
    config_echo.update(settings_echo(st));

    json curves = json::array();
    json files = json::array();
    double min_curv = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < n; ++m) {
        char name[64];
        std::snprintf(name, sizeof name, "boundary_patch%zu.csv", m);
        write_file(outdir / name, boundary_csv(sol.curves[m], cfg.eps, sol.centers[m]));
        files.push_back(name);
        curves.push_back(curve_json(sol.curves[m]));
        if (cfg.eps != 0.0)
            min_curv = std::min(min_curv, min_scaled_curvature(sol.curves[m], std::abs(cfg.eps)));
    }
    json result{{"centers", centers_json(sol.centers)},
                {"newton_iterations", sol.newton_iterations},
                {"residual_norm", sol.residual_norm},
                {"curves", curves},
                {"files", files}};
    if (cfg.eps != 0.0) result["min_scaled_curvature"] = min_curv;

    json manifest{{"version", version_string}, {"config", config_echo}, {"result", result}};
    const fs::path file = outdir / "multi.json";
    write_file(file, dump(manifest));
    std::printf("solved %zu patches: residual = %.3e in %d Newton steps\nwrote %s\n", n,
                sol.residual_norm, sol.newton_iterations, file.string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "steady vortex-patch and point-vortex equilibria on the flat torus:\n"
        "special-function identities, Green-function evaluation, and\n"
        "contour-dynamics patch solves with Fourier-Newton continuation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("vortex ") + version_string);

    std::optional<std::string> config_path, out_flag;
    app.add_option("--config", config_path, "JSON config file (flags override its fields)");
    app.add_option("--out", out_flag,
                   "output directory (overrides VORTEX_OUTPUT_DIR and the config file)");

    Flags f;
    auto add_rho = [&](CLI::App* c) { c->add_option("--rho", f.rho, "torus modulus in (0,1)"); };
    auto add_ring = [&](CLI::App* c) {
        c->add_option("--N", f.N, "number of patches / vortices");
        c->add_option("--d", f.d, "ring offset in (0, 2 pi / N), default pi/N (config key \"d\")");
        c->add_option("--height", f.h,
                      "ring height in (0, -log rho), default -log(rho)/2 (config key \"h\")");
    };
    auto add_solver = [&](CLI::App* c) {
        c->add_option("--M", f.M, "collocation nodes (even)");
        c->add_option("--J", f.J, "highest retained mode (2 <= J <= M/4)");
        c->add_option("--k", f.k, "Sobolev index of the solution space");
        c->add_option("--tol", f.tol_residual, "residual tolerance");
        c->add_option("--max-newton", f.max_newton, "Newton iteration cap");
        c->add_option("--fd-step", f.fd_step, "Jacobian finite-difference step");
    };

    CLI::App* c_id = app.add_subcommand("identities",
                                        "run the special-function and quadrature identity battery");
    c_id->fallthrough();
    add_rho(c_id);
    c_id->add_option("--tolerance", f.identity_tolerance,
                     "override the pass tolerance of every check");

    CLI::App* c_green = app.add_subcommand("green", "Green-function evaluation");
    c_green->require_subcommand(1);
    c_green->fallthrough();
    CLI::App* c_green_eval =
        c_green->add_subcommand("eval", "evaluate G, its regular part, and gradients");
    c_green_eval->fallthrough();
    add_rho(c_green_eval);
    c_green_eval->add_option("--x1", f.x1, "first coordinate of x");
    c_green_eval->add_option("--x2", f.x2, "second coordinate of x");
    c_green_eval->add_option("--y1", f.y1, "first coordinate of y");
    c_green_eval->add_option("--y2", f.y2, "second coordinate of y");

    CLI::App* c_eq = app.add_subcommand("equilibrium", "point-vortex equilibria");
    c_eq->require_subcommand(1);
    c_eq->fallthrough();
    CLI::App* c_eq_ring =
        c_eq->add_subcommand("ring", "build the N-ring configuration and report its residual");
    CLI::App* c_eq_check =
        c_eq->add_subcommand("check", "report the residual of the configured centers");
    CLI::App* c_eq_find =
        c_eq->add_subcommand("find", "refine the configured centers to an equilibrium");
    for (CLI::App* c : {c_eq_ring, c_eq_check, c_eq_find}) {
        c->fallthrough();
        add_rho(c);
    }
    add_ring(c_eq_ring);
    c_eq_find->add_option("--tol", f.tol_equilibrium, "equilibrium residual tolerance");

    CLI::App* c_patch = app.add_subcommand("patch", "contour-dynamics patch solves");
    c_patch->require_subcommand(1);
    c_patch->fallthrough();
    CLI::App* c_solve = c_patch->add_subcommand(
        "solve", "solve the single-layer ring problem at one patch scale");
    CLI::App* c_cont = c_patch->add_subcommand(
        "continue", "continue the single-layer ring family along the eps grid");
    CLI::App* c_multi =
        c_patch->add_subcommand("multi", "solve the multi-patch problem (curves and centers)");
    for (CLI::App* c : {c_solve, c_cont, c_multi}) {
        c->fallthrough();
        add_rho(c);
        add_ring(c);
        add_solver(c);
    }
    c_solve->add_option("--eps", f.eps, "patch scale");
    c_solve->add_option("--gamma", f.gamma, "background circulation seed, default N pi");
    c_cont->add_option("--gamma", f.gamma, "background circulation seed, default N pi");
    c_cont->add_option("--eps-grid", f.eps_grid, "continuation grid (starts at 0, increasing)")
        ->expected(-1);
    c_multi->add_option("--eps", f.eps, "patch scale");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config_fault;
    }

    try {
        RunConfig cfg;
        if (config_path) cfg = load_config_file(*config_path);
        overlay_flags(cfg, f);

        const fs::path outdir = resolve_output_dir(out_flag, cfg);
        try {
            fs::create_directories(outdir);
        } catch (const fs::filesystem_error& e) {
            throw config_error(std::string("cannot create output directory: ") + e.what());
        }

        if (c_id->parsed()) return cmd_identities(cfg, outdir);
        if (c_green_eval->parsed()) return cmd_green_eval(cfg, outdir);
        if (c_eq_ring->parsed()) return cmd_equilibrium("ring", cfg, outdir);
        if (c_eq_check->parsed()) return cmd_equilibrium("check", cfg, outdir);
        if (c_eq_find->parsed()) return cmd_equilibrium("find", cfg, outdir);
        if (c_solve->parsed()) return cmd_patch_solve(cfg, outdir);
        if (c_cont->parsed()) return cmd_patch_continue(cfg, outdir);
        if (c_multi->parsed()) return cmd_patch_multi(cfg, outdir);
        std::fprintf(stderr, "error: no subcommand selected\n");
        return exit_config_fault;
    } catch (const config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_config_fault;
    } catch (const domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_config_fault;
    } catch (const error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_numerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_numerical;
    }
}
