// Acceptance run: one PASS / FAIL / REPORT line per criterion, details indented below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ringflow/checks.hpp"
#include "ringflow/errors.hpp"
#include "ringflow/io.hpp"

using namespace ringflow;

namespace {

const double kH = 1.0 / 128.0;

enum class Outcome { Pass, Fail, Report };

struct Result {
    Outcome outcome = Outcome::Fail;
    std::vector<std::string> details;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ConvexRing fixture(const std::string& name)
{
    if (name == "square") return make_ring(ConvexBody::rectangle(-1, -1, 1, 1), ConvexBody::point({0, 0}));
    if (name == "disk") return make_ring(ConvexBody::disk({0, 0}, 1.0), ConvexBody::point({0, 0}));
    if (name == "annulus") return make_ring(ConvexBody::disk({0, 0}, 1.0), ConvexBody::disk({0, 0}, 0.4));
    if (name == "ellipse") return make_ring(ConvexBody::ellipse({0, 0}, 1.5, 1.0), ConvexBody::point({0, 0}));
    return make_ring(ConvexBody::regular_polygon({0, 0}, 1.0, 6), ConvexBody::point({0, 0}));
}

struct Solved {
    ScalarField V;
    VectorField grad;
    double seconds = 0.0;
};

const Solved& solved(const std::string& name, double h = kH)
{
    static std::map<std::pair<std::string, double>, Solved> cache;
    auto it = cache.find({name, h});
    if (it != cache.end()) return it->second;
    const auto t0 = std::chrono::steady_clock::now();
    ScalarField V = solve_infinity(build_grid(fixture(name), h), SolveParams{});
    const double t = seconds_since(t0);
    VectorField g = gradient(V);
    return cache.emplace(std::make_pair(name, h), Solved{std::move(V), std::move(g), t}).first->second;
}

template <class F>
void for_interior(const Grid& g, F f)
{
    for (int k = 0; k < static_cast<int>(g.size()); ++k)
        if (g.is_interior(k)) f(k, g.node(k));
}

Result verdict_details(Result r, const std::vector<Verdict>& vs)
{
    for (const Verdict& v : vs) r.details.push_back(verdict_line(v));
    return r;
}

Outcome pass_if(bool ok) { return ok ? Outcome::Pass : Outcome::Fail; }

// 1. Unit disk: cone away from the apex, unit speed, runtime.
Result stadium_disk()
{
    const Solved& s = solved("disk");
    const Grid& g = *s.V.grid;
    double err = 0.0, lo = 1e300, hi = 0.0;
    for_interior(g, [&](int k, Vec2 x) {
        if (g.gamma_distance(x) <= 4.0 * kH) return;
        err = std::max(err, std::abs(s.V.values[k] - (1.0 - norm(x))));
        // Gradients keep the usual 2h clearance from the outer boundary.
        if (g.outer_distance(x) < 2.0 * kH) return;
        lo = std::min(lo, norm(s.grad.values[k]));
        hi = std::max(hi, norm(s.grad.values[k]));
    });
    Result r;
    r.outcome = pass_if(err <= 0.02 && lo >= 0.95 && hi <= 1.05 && s.seconds <= 60.0);
    r.details.push_back(fmt("max |V - (1-|x|)| = %.4f (<= 0.02)", err));
    r.details.push_back(fmt("|grad V| in [%.4f, %.4f] (need [0.95, 1.05])", lo, hi));
    r.details.push_back(fmt("solve time %.1f s (<= 60)", s.seconds));
    return r;
}

// 2. Annulus r0 = 0.4: the radial cone saturates the gradient bound.
Result annulus_cone()
{
    const Solved& s = solved("annulus");
    const Grid& g = *s.V.grid;
    double err = 0.0, hi = 0.0;
    for_interior(g, [&](int k, Vec2 x) {
        err = std::max(err, std::abs(s.V.values[k] - (1.0 - norm(x)) / 0.6));
        if (g.outer_distance(x) >= 2.0 * kH && g.gamma_distance(x) >= 2.0 * kH)
            hi = std::max(hi, norm(s.grad.values[k]));
    });
    const double rel = std::abs(hi * 0.6 - 1.0);
    Result r;
    r.outcome = pass_if(err <= 0.02 && rel <= 0.03);
    r.details.push_back(fmt("max |V - (1-r)/0.6| = %.4f (<= 0.02)", err));
    r.details.push_back(fmt("max |grad V| = %.4f vs 1/0.6 = %.4f: %.2f%% (<= 3%%)", hi, 1.0 / 0.6, 100.0 * rel));
    return r;
}

// 3. The square suite at h = 1/128.
Result square_suite_run()
{
    const Solved& s = solved("square");
    const auto vs = square_suite(s.V, s.grad);
    return verdict_details(Result{pass_if(all_passed(vs)), {}}, vs);
}

// Largest positive part of the normalized flux over contours and exponents.
double flux_violation(const Solved& s, const std::vector<Polyline>& contours, int& failures)
{
    double worst = 0.0;
    for (double p : {2.0, 3.0, 6.0})
        for (const Polyline& c : contours) {
            const Verdict v = flux_check(s.V, s.grad, c, p);
            if (v.failed()) ++failures;
            worst = std::max(worst, v.value("normalized_flux"));
        }
    return std::max(worst, 0.0);
}

// 4. Flux inequality on 50 random rectangles, then again at h/2.
Result flux_inequality()
{
    const Solved& coarse = solved("square");
    const auto rects = random_rectangle_contours(*coarse.V.grid, 50, 2024);
    int fails = 0;
    const double v128 = flux_violation(coarse, rects, fails);

    // h = 1/256, warm-started from the prolonged 1/128 field.
    const double h2 = kH / 2.0;
    const auto t0 = std::chrono::steady_clock::now();
    const GridPtr fine = build_grid(fixture("square"), h2);
    const ScalarField start = sample_function(fine, [&](Vec2 x) {
        try {
            return sample(coarse.V, x);
        } catch (const OutOfDomain&) {
            return 0.0;
        }
    });
    Solved f;
    f.V = solve_infinity(fine, SolveParams{}, &start);
    f.grad = gradient(f.V);
    const double t = seconds_since(t0);
    int fine_fails = 0;
    const double v256 = flux_violation(f, rects, fine_fails);

    Result r;
    r.outcome = pass_if(fails == 0 && v256 <= v128);
    r.details.push_back(fmt("h=1/128: %d of 150 checks above sqrt(h) = %.4f; violation %.3e", fails, std::sqrt(kH), v128));
    r.details.push_back(fmt("h=1/256: violation %.3e (must not exceed the 1/128 value); %d above sqrt(h); solve %.1f s",
                            v256, fine_fails, t));
    return r;
}

// 5. Log inequality, p = 2, 20 contours on the square and the disk.
Result log_inequality()
{
    Result r;
    bool ok = true;
    for (const char* name : {"square", "disk"}) {
        const Solved& s = solved(name);
        int fails = 0;
        double worst = -1e300;
        for (const Polyline& c : random_rectangle_contours(*s.V.grid, 20, 77)) {
            const Verdict v = log_flux_check(s.V, s.grad, c, 2.0);
            if (v.failed()) ++fails;
            worst = std::max(worst, v.value("normalized_violation"));
        }
        ok = ok && fails == 0;
        r.details.push_back(fmt("%s: %d of 20 fail; largest normalized violation %.3e (slack %.4f)", name, fails,
                                worst, std::sqrt(kH)));
    }
    r.outcome = pass_if(ok);
    return r;
}

// 6. Inner gradient limit on the ellipse.
Result inner_limit()
{
    const Solved& s = solved("ellipse");
    const Verdict v = inner_limit_check(s.V, s.grad);
    return verdict_details(Result{pass_if(!v.failed()), {}}, {v});
}

// 7. Cl-criterion at the corner (1, -1).
Result corner_criterion()
{
    const Solved& s = solved("square");
    const ClCriterionResult c = cl_criterion(s.V, s.grad, {1, -1});
    Result r;
    r.outcome = pass_if(c.limits.alpha <= 0.2 && c.limits.beta >= 0.8 && c.verdict.status == Status::Pass);
    r.details.push_back(fmt("alpha = %.4f (<= 0.2), beta = %.4f (>= 0.8)", c.limits.alpha, c.limits.beta));
    r.details.push_back(verdict_line(c.verdict));
    return r;
}

// 8. Off-disk streamlines merge on the ellipse; the disk is skipped.
Result theorem_single()
{
    const Solved& e = solved("ellipse");
    const Solved& d = solved("disk");
    const Verdict ve = theorem_single_check(e.V, e.grad);
    const Verdict vd = theorem_single_check(d.V, d.grad);
    return verdict_details(Result{pass_if(ve.status == Status::Pass && vd.status == Status::Skipped), {}}, {ve, vd});
}

// 9. High-ridge gluing: the rectangle around its ridge segment and the capsule stadium.
Result gluing()
{
    const double h = 1.0 / 64.0;
    const ConvexRing rect =
        make_ring(ConvexBody::rectangle(-2, -1, 2, 1), ConvexBody::segment({-1, 0}, {1, 0}));
    const ConvexRing capsule =
        make_ring(ConvexBody::capsule({-0.5, 0}, {0.5, 0}, 1.0), ConvexBody::segment({-0.5, 0}, {0.5, 0}));
    const Verdict a = hr_glued_check(rect, h, SolveParams{});
    const Verdict b = hr_glued_check(capsule, h, SolveParams{});
    Result r = verdict_details(Result{pass_if(!a.failed() && !b.failed()), {}}, {a, b});
    r.details.push_back("spacing h = 1/64; first line rectangle [-2,2]x[-1,1], second capsule");
    return r;
}

// 10. Refinement consistency and no crossings, 20 seeds per fixture.
Result uniqueness()
{
    Result r;
    bool ok = true;
    for (const char* name : {"square", "disk", "annulus", "ellipse", "hexagon"}) {
        const Solved& s = solved(name);
        const Grid& g = *s.V.grid;
        std::vector<Vec2> seeds;
        for (int k = 0; k < 20; ++k) seeds.push_back(boundary_point_at(g.ring.outer, (k + 0.5) / 20.0));
        double worst = 0.0;
        for (Vec2 seed : seeds) worst = std::max(worst, refinement_consistency(s.V, s.grad, seed));
        const auto lines = trace_all(s.V, s.grad, seeds);
        int crossings = 0;
        for (size_t i = 0; i < lines.size(); ++i)
            for (size_t j = i + 1; j < lines.size(); ++j)
                if (crossing_check(lines[i], lines[j], default_merge_tolerance(g))) ++crossings;
        ok = ok && worst <= 2.0 * kH && crossings == 0;
        r.details.push_back(fmt("%-8s refinement %.2e (<= 2h = %.2e), crossing pairs %d of 190", name, worst, 2.0 * kH,
                                crossings));
    }
    r.outcome = pass_if(ok);
    return r;
}

// 11. |V_p - V_inf| over p = 8, 16, 32, 64 on the square (continuation in p).
Result p_trend()
{
    const double h = 1.0 / 64.0;
    const Solved& inf = solved("square", h);
    const GridPtr grid = inf.V.grid;
    ScalarField prev = initial_guess(grid);
    std::vector<double> d;
    Result r;
    for (double p : {8.0, 16.0, 32.0, 64.0}) {
        SolveParams sp;
        sp.relaxation = 1.5;
        const auto t0 = std::chrono::steady_clock::now();
        prev = solve_p(grid, p, sp, &prev);
        d.push_back(max_interior_difference(prev, inf.V));
        r.details.push_back(fmt("p=%-3g |V_p - V_inf| = %.4f (%.1f s)", p, d.back(), seconds_since(t0)));
    }
    int rises = 0;
    double largest = 0.0;
    for (size_t k = 1; k < d.size(); ++k)
        if (d[k] > d[k - 1]) ++rises, largest = std::max(largest, d[k] - d[k - 1]);
    if (rises == 0) r.outcome = Outcome::Pass;
    else if (rises == 1 && largest <= 0.005) r.outcome = Outcome::Report;
    else r.outcome = Outcome::Fail;
    r.details.push_back(fmt("h = 1/64; increases: %d, largest %.4f (report-only allowance 0.005 at one step)", rises,
                            largest));
    return r;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance criteria for the ring potential lab"};
    bool strict = false;
    std::vector<int> only;
    app.add_flag("--strict", strict, "exit 1 when any criterion fails (default: report and exit 0)");
    app.add_option("--only", only, "run only these criteria (1-11)")->check(CLI::Range(1, 11));
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
        {"stadium exactness (disk)", stadium_disk},
        {"annulus cone", annulus_cone},
        {"square suite", square_suite_run},
        {"flux inequality", flux_inequality},
        {"log inequality", log_inequality},
        {"inner gradient limit (ellipse)", inner_limit},
        {"Cl-criterion at a corner", corner_criterion},
        {"off-disk streamlines merge", theorem_single},
        {"high-ridge gluing", gluing},
        {"uniqueness surrogate", uniqueness},
        {"p-continuation trend", p_trend},
    };

    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Result r;
        try {
            r = criteria[i].second();
        } catch (const Error& e) {
            r.outcome = Outcome::Fail;
            r.details.push_back(std::string("error: ") + e.what());
        }
        const char* tag = r.outcome == Outcome::Pass ? "PASS" : r.outcome == Outcome::Fail ? "FAIL" : "REPORT";
        if (r.outcome == Outcome::Fail) ++failed;
        std::printf("%-6s %2d  %-32s (%.1f s)\n", tag, id, criteria[i].first.c_str(), seconds_since(t0));
        for (const std::string& line : r.details) std::printf("           %s\n", line.c_str());
        std::fflush(stdout);
    }
    std::printf("%d criteria failed\n", failed);
    return strict && failed ? 1 : 0;
}
