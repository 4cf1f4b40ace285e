#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ringflow/checks.hpp"
#include "ringflow/errors.hpp"
#include "ringflow/io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace ringflow;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kNumerical = 3 };

struct Options {
    std::string domain;
    std::string field;
    double h = 1.0 / 128.0;
    double r_gamma = 0.0;
    double p = 0.0;
    double tol = 1e-8;
    double omega = 0.0;
    int seeds = 16;
    std::vector<std::string> seed_at;
    long long seed_int = -1;
    int contours = 10;
    std::string out = ".";
    int stencil_m = 3;
    int stencil_k = 16;
    bool parallel = false;
    int canvas = 800;
    std::vector<double> levels{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
};

SolveParams solve_params(const Options& o)
{
    SolveParams s;
    s.stencil_m = o.stencil_m;
    s.directions = o.stencil_k;
    s.tol_res = o.tol;
    s.order = o.parallel ? SweepOrder::Checkerboard : SweepOrder::Lexicographic;
    if (o.omega > 0.0) s.relaxation = o.omega;
    else if (o.p > 0.0) s.relaxation = 1.5;
    validate(s);
    return s;
}

CheckParams check_params(const Options& o)
{
    CheckParams c;
    c.tol_res = o.tol;
    c.seeds_per_side = o.seeds;
    return c;
}

fs::path out_dir(const Options& o)
{
    fs::path dir(o.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    return dir;
}

void require_finite(const ScalarField& f)
{
    const Grid& g = *f.grid;
    for (size_t k = 0; k < f.values.size(); ++k) {
        if (g.cls[k] == NodeClass::Exterior) continue;
        if (!std::isfinite(f.values[k])) {
            const Vec2 x = g.node(static_cast<int>(k));
            throw NumericalError("non-finite field value at node (" + std::to_string(g.col(static_cast<int>(k))) +
                                 ", " + std::to_string(g.row(static_cast<int>(k))) + ") = (" +
                                 std::to_string(x.x) + ", " + std::to_string(x.y) + ")");
        }
    }
}

ScalarField solve(const ConvexRing& ring, const Options& o)
{
    const GridPtr grid = build_grid(ring, o.h, o.r_gamma);
    const SolveParams params = solve_params(o);
    ScalarField f = o.p > 0.0 ? solve_p(grid, o.p, params) : solve_infinity(grid, params);
    require_finite(f);
    return f;
}

std::vector<Vec2> seeds_for(const Grid& g, const Options& o)
{
    std::vector<Vec2> seeds;
    if (!o.seed_at.empty()) {
        for (const std::string& s : o.seed_at) {
            const auto comma = s.find(',');
            if (comma == std::string::npos) throw ValidationError("--seed-at expects x,y but got '" + s + "'");
            try {
                seeds.push_back({std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))});
            } catch (const std::exception&) {
                throw ValidationError("--seed-at expects x,y but got '" + s + "'");
            }
        }
    } else if (o.seed_int >= 0) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(o.seed_int));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 4 * o.seeds; ++k) seeds.push_back(boundary_point_at(g.ring.outer, u(rng)));
    } else {
        seeds = boundary_seeds(g.ring.outer, o.seeds);
    }
    return seeds;
}

struct Traced {
    std::vector<Streamline> lines;
    MergeTree tree;
};

Traced trace(const ScalarField& f, const std::vector<Vec2>& seeds)
{
    const VectorField vf = gradient(f);
    Traced t;
    t.lines = trace_all(f, vf, seeds);
    t.tree = merge_tree(t.lines, default_merge_tolerance(*f.grid));
    return t;
}

void save_traced(const fs::path& dir, const Traced& t)
{
    save_streamlines((dir / "streamlines.csv").string(), t.lines);
    save_merge_tree((dir / "merge_tree.json").string(), t.tree);
}

RenderSpec render_spec(const Options& o)
{
    RenderSpec spec;
    spec.canvas = o.canvas;
    spec.levels = o.levels;
    return spec;
}

bool is_square_fixture(const ConvexRing& ring)
{
    const auto* poly = ring.outer.as<PolygonShape>();
    const auto* pt = ring.inner.as<PointShape>();
    if (!poly || !pt || poly->vertices.size() != 4 || !(pt->center == Vec2{0.0, 0.0})) return false;
    for (Vec2 v : poly->vertices)
        if (std::abs(std::abs(v.x) - 1.0) > 1e-12 || std::abs(std::abs(v.y) - 1.0) > 1e-12) return false;
    return true;
}

std::vector<Verdict> verify_field(const ScalarField& f, const Options& o)
{
    require_finite(f);
    const Grid& g = *f.grid;
    const VectorField vf = gradient(f);
    const CheckParams cp = check_params(o);
    std::vector<Verdict> out;
    out.push_back(gradient_bounds_check(f, vf, cp));
    out.push_back(outer_lower_bound_check(f, vf, cp));
    if (g.ring.inner.as<PointShape>()) {
        out.push_back(inner_limit_check(f, vf, cp));
        out.push_back(theorem_single_check(f, vf, cp));
    }
    const std::uint64_t seed = o.seed_int >= 0 ? static_cast<std::uint64_t>(o.seed_int) : 0;
    const double p = o.p > 0.0 ? o.p : 2.0;
    for (const Polyline& c : random_rectangle_contours(g, o.contours, seed)) {
        out.push_back(flux_check(f, vf, c, p, cp));
        out.push_back(log_flux_check(f, vf, c, p, cp));
    }
    if (is_square_fixture(g.ring))
        for (Verdict& v : square_suite(f, vf, cp)) out.push_back(std::move(v));
    return out;
}

int finish_report(const fs::path& dir, const std::vector<Verdict>& verdicts)
{
    save_report((dir / "report.json").string(), verdicts);
    for (const Verdict& v : verdicts) std::cout << verdict_line(v) << "\n";
    const bool ok = all_passed(verdicts);
    std::cout << (ok ? "all assertive verdicts passed" : "verification failed") << "\n";
    return ok ? kOk : kVerifyFailed;
}

int run_solve(const Options& o)
{
    const ScalarField f = solve(load_domain(o.domain), o);
    const fs::path dir = out_dir(o);
    save_field((dir / "field.txt").string(), f);
    std::cout << "wrote " << (dir / "field.txt").string() << "\n";
    return kOk;
}

int run_trace(const Options& o)
{
    const ScalarField f = load_field(o.field);
    require_finite(f);
    const Traced t = trace(f, seeds_for(*f.grid, o));
    const fs::path dir = out_dir(o);
    save_traced(dir, t);
    std::cout << t.lines.size() << " streamlines, " << t.tree.edges.size() << " merge edges\n";
    return kOk;
}

int run_verify(const Options& o)
{
    const ScalarField f = load_field(o.field);
    return finish_report(out_dir(o), verify_field(f, o));
}

int run_render(const Options& o)
{
    const ScalarField f = load_field(o.field);
    require_finite(f);
    Traced t;
    if (o.seeds > 0 || !o.seed_at.empty()) t = trace(f, seeds_for(*f.grid, o));
    const fs::path dir = out_dir(o);
    save_svg((dir / "figure.svg").string(), f, t.lines, t.tree, render_spec(o));
    std::cout << "wrote " << (dir / "figure.svg").string() << "\n";
    return kOk;
}

// Solves, traces, verifies and renders a fixture; artifacts land in --out.
int reproduce(const ConvexRing& ring, const Options& o, const std::vector<Vec2>& extra_seeds,
              const std::vector<Verdict>& extra_verdicts)
{
    const fs::path dir = out_dir(o);
    save_domain((dir / "domain.json").string(), ring);
    const ScalarField f = solve(ring, o);
    save_field((dir / "field.txt").string(), f);
    std::vector<Vec2> seeds = seeds_for(*f.grid, o);
    seeds.insert(seeds.end(), extra_seeds.begin(), extra_seeds.end());
    const Traced t = trace(f, seeds);
    save_traced(dir, t);
    save_svg((dir / "figure.svg").string(), f, t.lines, t.tree, render_spec(o));

    std::vector<Verdict> verdicts = extra_verdicts;
    const VectorField vf = gradient(f);
    const CheckParams cp = check_params(o);
    if (is_square_fixture(ring)) {
        for (Verdict& v : square_suite(f, vf, cp)) verdicts.push_back(std::move(v));
    } else {
        verdicts.push_back(gradient_bounds_check(f, vf, cp));
        verdicts.push_back(outer_lower_bound_check(f, vf, cp));
        if (ring.inner.as<PointShape>()) {
            verdicts.push_back(inner_limit_check(f, vf, cp));
            verdicts.push_back(theorem_single_check(f, vf, cp));
        }
    }
    Verdict merges;
    merges.name = "merge_count";
    merges.anchor = "Cl-points found among the traced streamlines";
    merges.measured = {{"streamlines", static_cast<double>(t.lines.size())},
                       {"merge_edges", static_cast<double>(t.tree.edges.size())}};
    verdicts.push_back(merges);
    return finish_report(dir, verdicts);
}

int run_reproduce_square(const Options& o)
{
    const ConvexRing ring = make_ring(ConvexBody::rectangle(-1, -1, 1, 1), ConvexBody::point({0, 0}));
    const std::vector<Vec2> extra{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}, {0, -1}, {1, 0}, {0, 1}, {-1, 0}};
    return reproduce(ring, o, extra, {});
}

int run_reproduce_stadium(const Options& o)
{
    const Vec2 a{-0.5, 0.0}, b{0.5, 0.0};
    const ConvexRing ring = make_ring(ConvexBody::capsule(a, b, 1.0), ConvexBody::segment(a, b));
    const Verdict glued = hr_glued_check(ring, o.h, solve_params(o), check_params(o), o.r_gamma);
    return reproduce(ring, o, {}, {glued});
}

int run_reproduce_ellipse(const Options& o)
{
    const ConvexRing ring = make_ring(ConvexBody::ellipse({0, 0}, 1.5, 1.0), ConvexBody::point({0, 0}));
    return reproduce(ring, o, {}, {});
}

void add_solver_flags(CLI::App* app, Options& o)
{
    app->add_option("--h", o.h, "lattice spacing")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--r-gamma", o.r_gamma, "capture radius of a point or segment Gamma (0 selects h)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    app->add_option("--tol", o.tol, "stop when the max nodal update falls below this")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--stencil-m", o.stencil_m, "stencil radius in cells")->capture_default_str()->check(CLI::Range(1, 16));
    app->add_option("--stencil-k", o.stencil_k, "stencil directions, a multiple of 8")->capture_default_str();
    app->add_flag("--parallel", o.parallel, "checkerboard sweeps (threaded when OpenMP is available)");
}

void add_seed_flags(CLI::App* app, Options& o)
{
    app->add_option("--seeds", o.seeds, "seeds per polygon side (4x this many on smooth boundaries)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    app->add_option("--seed-int", o.seed_int,
                    "draw 4*seeds boundary seeds pseudo-randomly from this integer (default: evenly spaced)");
    app->add_option("--seed-at", o.seed_at, "explicit seed x,y (repeatable; overrides --seeds)");
}

void add_render_flags(CLI::App* app, Options& o)
{
    app->add_option("--canvas", o.canvas, "canvas size in pixels")->capture_default_str();
    app->add_option("--levels", o.levels, "level curves to draw")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Infinity-harmonic potentials on planar convex rings: solve, trace, verify, render"};
    app.set_help_flag("--help", "print this help and exit");  // -h would shadow --h
    app.require_subcommand(1);
    Options o;
    auto out_flag = [&](CLI::App* sub) {
        sub->add_option("--out", o.out, "output directory")->capture_default_str();
    };

    auto* solve_cmd = app.add_subcommand("solve", "solve a domain spec and write field.txt");
    solve_cmd->add_option("--domain", o.domain, "domain spec JSON")->required()->check(CLI::ExistingFile);
    add_solver_flags(solve_cmd, o);
    solve_cmd->add_option("--p", o.p, "solve the p-Laplacian for this p >= 2 instead (0 = infinity)")
        ->capture_default_str();
    solve_cmd->add_option("--omega", o.omega, "over-relaxation factor (0 selects 1, or 1.5 with --p)")
        ->capture_default_str();
    out_flag(solve_cmd);

    auto* trace_cmd = app.add_subcommand("trace", "trace ascending streamlines; write streamlines.csv and merge_tree.json");
    trace_cmd->add_option("--field", o.field, "field snapshot")->required()->check(CLI::ExistingFile);
    add_seed_flags(trace_cmd, o);
    out_flag(trace_cmd);

    auto* verify_cmd = app.add_subcommand("verify", "run the property checks on a field; write report.json");
    verify_cmd->add_option("--field", o.field, "field snapshot")->required()->check(CLI::ExistingFile);
    verify_cmd->add_option("--p", o.p, "exponent for the flux checks (0 selects 2)")->capture_default_str();
    verify_cmd->add_option("--tol", o.tol, "solver tolerance the field was computed with")->capture_default_str();
    verify_cmd->add_option("--seeds", o.seeds, "seeds per side for the square suite")->capture_default_str();
    verify_cmd->add_option("--seed-int", o.seed_int, "seed for the random flux contours (default 0)");
    verify_cmd->add_option("--contours", o.contours, "number of random flux contours")->capture_default_str();
    out_flag(verify_cmd);

    auto* render_cmd = app.add_subcommand("render", "draw level curves, streamlines and Cl-points to figure.svg");
    render_cmd->add_option("--field", o.field, "field snapshot")->required()->check(CLI::ExistingFile);
    add_seed_flags(render_cmd, o);
    add_render_flags(render_cmd, o);
    out_flag(render_cmd);

    std::vector<CLI::App*> reproducers;
    reproducers.push_back(app.add_subcommand("reproduce-square", "square with a point Gamma: full pipeline"));
    reproducers.push_back(app.add_subcommand("reproduce-stadium", "capsule with its ridge segment: full pipeline"));
    reproducers.push_back(app.add_subcommand("reproduce-ellipse", "ellipse 1.5 x 1 with a point Gamma: full pipeline"));
    for (CLI::App* sub : reproducers) {
        add_solver_flags(sub, o);
        add_seed_flags(sub, o);
        add_render_flags(sub, o);
        out_flag(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

#ifdef _OPENMP
    if (!o.parallel) omp_set_num_threads(1);
#endif

    try {
        if (solve_cmd->parsed()) return run_solve(o);
        if (trace_cmd->parsed()) return run_trace(o);
        if (verify_cmd->parsed()) return run_verify(o);
        if (render_cmd->parsed()) return run_render(o);
        if (reproducers[0]->parsed()) return run_reproduce_square(o);
        if (reproducers[1]->parsed()) return run_reproduce_stadium(o);
        if (reproducers[2]->parsed()) return run_reproduce_ellipse(o);
    } catch (const NoConvergence& e) {
        std::cerr << "error: " << e.what() << " (after " << e.sweeps() << " sweeps, update " << e.residual()
                  << ")\n";
        return kNumerical;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
