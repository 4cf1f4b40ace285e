#include "ringflow/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "ringflow/errors.hpp"

namespace ringflow {

std::string to_string(Status s)
{
    switch (s) {
        case Status::Pass: return "pass";
        case Status::Fail: return "fail";
        case Status::ReportOnly: return "report-only";
        case Status::Skipped: return "skipped";
    }
    return "unknown";
}

double Verdict::value(const std::string& key) const
{
    for (const auto* list : {&measured, &thresholds})
        for (const auto& [k, v] : *list)
            if (k == key) return v;
    return std::numeric_limits<double>::quiet_NaN();
}

bool all_passed(const std::vector<Verdict>& verdicts)
{
    return std::none_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.failed(); });
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Verdict make_verdict(std::string name, std::string anchor)
{
    Verdict v;
    v.name = std::move(name);
    v.anchor = std::move(anchor);
    return v;
}

Status pass_if(bool ok) { return ok ? Status::Pass : Status::Fail; }

double merge_tol(const Grid& g, const CheckParams& params)
{
    return params.tol_merge > 0.0 ? params.tol_merge : default_merge_tolerance(g);
}

TraceParams trace_params(const CheckParams& params)
{
    TraceParams tp;
    tp.delta_stop = params.delta_stop;
    return tp;
}


// Interior nodes at least c away from both boundaries.
std::vector<int> clear_nodes(const Grid& g, double c)
{
    const ConvexBody obstacle = g.inner_obstacle();
    std::vector<int> out;
    for (int k = 0; k < static_cast<int>(g.size()); ++k) {
        if (!g.is_interior(k)) continue;
        const Vec2 x = g.node(k);
        if (g.outer_distance(x) >= c && distance_to(obstacle, x) >= c) out.push_back(k);
    }
    return out;
}

double signed_area(const std::vector<Vec2>& v)
{
    double a = 0.0;
    for (size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
    return 0.5 * a;
}

bool inside_polygon(const std::vector<Vec2>& v, Vec2 x)
{
    bool in = false;
    for (size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        if ((v[i].y > x.y) != (v[j].y > x.y)) {
            const double t = (x.y - v[i].y) / (v[j].y - v[i].y);
            if (x.x < v[i].x + t * (v[j].x - v[i].x)) in = !in;
        }
    }
    return in;
}

// Greedy clustering: points farther than tol from every kept point.
std::vector<Vec2> distinct_points(const std::vector<Vec2>& pts, double tol)
{
    std::vector<Vec2> kept;
    for (const Vec2& p : pts) {
        const bool fresh = std::all_of(kept.begin(), kept.end(),
                                       [&](const Vec2& q) { return distance(p, q) > tol; });
        if (fresh) kept.push_back(p);
    }
    return kept;
}

std::vector<ClPoint> pairwise_merges(const std::vector<Streamline>& lines, double tol, double delta_stop)
{
    std::vector<ClPoint> out;
    for (size_t i = 0; i < lines.size(); ++i)
        for (size_t j = i + 1; j < lines.size(); ++j)
            if (auto m = detect_merge(lines[i], lines[j], tol, delta_stop)) out.push_back(*m);
    return out;
}

}  // namespace

Polyline rectangle_contour(Vec2 lo, Vec2 hi)
{
    return Polyline{{lo, {hi.x, lo.y}, hi, {lo.x, hi.y}}};
}

Polyline circle_contour(Vec2 c, double r, int n)
{
    Polyline out;
    for (int k = 0; k < n; ++k) {
        const double t = 2.0 * std::numbers::pi * k / n;
        out.vertices.push_back({c.x + r * std::cos(t), c.y + r * std::sin(t)});
    }
    return out;
}

std::vector<Polyline> random_rectangle_contours(const Grid& grid, int n, std::uint64_t seed)
{
    const double h = grid.h;
    const double margin = 3.0 * h;
    const ConvexBody obstacle = grid.inner_obstacle();
    const BoundingBox box = bounding_box(grid.ring.outer);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(box.lo.x, box.hi.x), uy(box.lo.y, box.hi.y);
    auto clear = [&](Vec2 x) {
        return contains(grid.ring.outer, x) && grid.outer_distance(x) >= margin &&
               distance_to(obstacle, x) >= margin;
    };
    const Vec2 core = body_center(grid.ring.inner);
    std::vector<Polyline> out;
    for (long tries = 0; static_cast<int>(out.size()) < n; ++tries) {
        if (tries > 200000L * std::max(n, 1)) throw ValidationError("no rectangle fits inside the ring");
        double x0 = ux(rng), x1 = ux(rng), y0 = uy(rng), y1 = uy(rng);
        if (x0 > x1) std::swap(x0, x1);
        if (y0 > y1) std::swap(y0, y1);
        if (x1 - x0 < 8.0 * h || y1 - y0 < 8.0 * h) continue;
        if (core.x > x0 - margin && core.x < x1 + margin && core.y > y0 - margin && core.y < y1 + margin)
            continue;
        const Polyline c = rectangle_contour({x0, y0}, {x1, y1});
        bool ok = true;
        for (size_t k = 0; k < 4 && ok; ++k) {
            const Vec2 a = c.vertices[k], b = c.vertices[(k + 1) % 4];
            const int m = static_cast<int>(std::ceil(distance(a, b) / h));
            for (int i = 0; i <= m && ok; ++i) ok = clear(a + (b - a) * (static_cast<double>(i) / m));
        }
        if (ok) out.push_back(c);
    }
    return out;
}

FluxMeasure measure_flux(const ScalarField& field, const VectorField& vf, const Polyline& contour,
                         double p, bool log_field)
{
    const Grid& g = *field.grid;
    if (!(p >= 2.0)) throw ValidationError("flux exponent must be at least 2");
    if (contour.vertices.size() < 3) throw ValidationError("contour needs at least three vertices");
    std::vector<Vec2> v = contour.vertices;
    if (signed_area(v) < 0.0) std::reverse(v.begin(), v.end());

    const ConvexBody obstacle = g.inner_obstacle();
    auto check_clearance = [&](Vec2 x) {
        if (g.outer_distance(x) < 2.0 * g.h || !contains(g.ring.outer, x) ||
            distance_to(obstacle, x) < 2.0 * g.h)
            throw ContourTouchesBoundary("contour comes within 2h of the ring boundary");
    };
    auto grad_at = [&](Vec2 x) {
        Vec2 gr = sample_gradient(vf, x);
        if (log_field) gr = gr / sample(field, x);
        return gr;
    };

    // Composite midpoint rule, pieces no longer than h/2.
    struct Node {
        Vec2 grad;
        Vec2 normal;
        double ds;
    };
    std::vector<Node> quad;
    FluxMeasure m;
    for (size_t i = 0; i < v.size(); ++i) {
        const Vec2 a = v[i], b = v[(i + 1) % v.size()];
        const double len = distance(a, b);
        if (len == 0.0) continue;
        check_clearance(a);
        const Vec2 t = (b - a) / len;
        const Vec2 n{t.y, -t.x};
        const int pieces = std::max(1, static_cast<int>(std::ceil(len / (0.5 * g.h))));
        for (int q = 0; q < pieces; ++q) {
            const Vec2 x = a + (b - a) * ((q + 0.5) / pieces);
            check_clearance(x);
            const Vec2 gr = grad_at(x);
            quad.push_back({gr, n, len / pieces});
            m.max_grad = std::max(m.max_grad, norm(gr));
        }
        m.length += len;
    }
    const double big = m.max_grad > 0.0 ? m.max_grad : 1.0;
    for (const Node& q : quad) {
        const Vec2 gs = q.grad / big;
        const double w = std::pow(norm(gs), p - 2.0);
        m.normalized_flux += w * dot(gs, q.normal) * q.ds;
    }
    m.normalized_flux /= m.length;
    m.flux = m.normalized_flux * m.length * std::pow(big, p - 1.0);

    if (log_field) {
        // Midpoint rule over the grid cells whose centres lie inside the contour.
        Vec2 lo = v.front(), hi = v.front();
        for (const Vec2& x : v) {
            lo = {std::min(lo.x, x.x), std::min(lo.y, x.y)};
            hi = {std::max(hi.x, x.x), std::max(hi.y, x.y)};
        }
        const int i0 = static_cast<int>(std::floor((lo.x - g.origin.x) / g.h));
        const int i1 = static_cast<int>(std::ceil((hi.x - g.origin.x) / g.h));
        const int j0 = static_cast<int>(std::floor((lo.y - g.origin.y) / g.h));
        const int j1 = static_cast<int>(std::ceil((hi.y - g.origin.y) / g.h));
        double area = 0.0;
        for (int j = j0; j < j1; ++j)
            for (int i = i0; i < i1; ++i) {
                const Vec2 c = g.node(i, j) + Vec2{0.5 * g.h, 0.5 * g.h};
                if (!inside_polygon(v, c) || contains(obstacle, c)) continue;
                area += std::pow(norm(grad_at(c)) / big, p) * big * g.h * g.h;
            }
        m.normalized_area = -(p - 1.0) * area / m.length;
        m.area_term = m.normalized_area * m.length * std::pow(big, p - 1.0);
    }
    return m;
}

Verdict flux_check(const ScalarField& field, const VectorField& vf, const Polyline& contour, double p,
                   const CheckParams& params)
{
    const FluxMeasure m = measure_flux(field, vf, contour, p, false);
    const double eps = params.c_flux * std::sqrt(field.grid->h);
    Verdict v = make_verdict("flux_inequality", "outward flux of |grad V|^(p-2) grad V is <= 0");
    v.measured = {{"p", p}, {"flux", m.flux}, {"normalized_flux", m.normalized_flux},
                  {"length", m.length}, {"max_grad", m.max_grad}};
    v.thresholds = {{"eps_flux", eps}};
    v.status = pass_if(m.normalized_flux <= eps);
    return v;
}

Verdict log_flux_check(const ScalarField& field, const VectorField& vf, const Polyline& contour,
                       double p, const CheckParams& params)
{
    const FluxMeasure m = measure_flux(field, vf, contour, p, true);
    const double eps = params.c_flux * std::sqrt(field.grid->h);
    const double violation = m.normalized_flux - m.normalized_area;
    Verdict v = make_verdict("log_flux_inequality",
                             "-(p-1) * integral |grad log V|^p >= flux of |grad log V|^(p-2) grad log V");
    v.measured = {{"p", p}, {"area_term", m.area_term}, {"flux", m.flux},
                  {"normalized_violation", violation}, {"length", m.length}, {"max_grad", m.max_grad}};
    v.thresholds = {{"eps_flux", eps}};
    v.status = pass_if(violation <= eps);
    return v;
}

Verdict gradient_bounds_check(const ScalarField& field, const VectorField& vf, const CheckParams& params)
{
    const Grid& g = *field.grid;
    const double slack = params.c_grad * g.h;
    const double diam = diameter(g.ring.outer);
    double lo = kInf, hi = 0.0, footnote = kInf;
    for (int k : clear_nodes(g, 2.0 * g.h)) {
        const double s = norm(vf.values[k]);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
        footnote = std::min(footnote, s - field.values[k] / diam);
    }
    Verdict v = make_verdict("gradient_bounds",
                             "0 < |grad V| <= 1/dist(Gamma, boundary) and |grad V| >= V/diam");
    v.measured = {{"min_grad", lo}, {"max_grad", hi}, {"min_grad_minus_V_over_diam", footnote}};
    v.thresholds = {{"upper_bound", 1.0 / g.sep + slack}, {"footnote_slack", -slack}};
    v.status = pass_if(lo > 0.0 && hi <= 1.0 / g.sep + slack && footnote >= -slack);
    return v;
}

std::vector<int> gamma_annulus(const Grid& g)
{
    const double lo = std::max(4.0 * g.h, g.r_gamma + 3.0 * g.h);
    const double hi = lo + 4.0 * g.h;
    std::vector<int> out;
    for (int k = 0; k < static_cast<int>(g.size()); ++k) {
        if (!g.is_interior(k)) continue;
        const double d = g.gamma_distance(g.node(k));
        if (d >= lo && d <= hi) out.push_back(k);
    }
    return out;
}

Verdict inner_limit_check(const ScalarField& field, const VectorField& vf, const CheckParams&)
{
    const Grid& g = *field.grid;
    if (!g.ring.inner.as<PointShape>()) throw NotAPoint("inner limit check needs a point inner boundary");
    double sum = 0.0;
    const auto ring_nodes = gamma_annulus(g);
    for (int k : ring_nodes) sum += norm(vf.values[k]);
    const double mean = ring_nodes.empty() ? 0.0 : sum / ring_nodes.size();
    double gmax = 0.0;
    for (int k : clear_nodes(g, 2.0 * g.h)) gmax = std::max(gmax, norm(vf.values[k]));
    const double target = 1.0 / g.sep;
    Verdict v = make_verdict("inner_gradient_limit",
                             "|grad V| tends to sup |grad V| = 1/dist(Gamma, boundary) at a point Gamma");
    v.measured = {{"annulus_mean_grad", mean}, {"global_max_grad", gmax}, {"annulus_nodes", double(ring_nodes.size())}};
    v.thresholds = {{"target", target}, {"relative_tolerance", 0.1}};
    v.status = pass_if(!ring_nodes.empty() && std::abs(mean - target) <= 0.1 * target &&
                       std::abs(mean - gmax) <= 0.1 * gmax);
    return v;
}

Verdict outer_lower_bound_check(const ScalarField& field, const VectorField& vf, const CheckParams& params)
{
    const Grid& g = *field.grid;
    double lo = kInf;
    for (int k : gamma_annulus(g)) lo = std::min(lo, norm(vf.values[k]));
    const double bound = 1.0 / diameter(g.ring.outer) - params.c_grad * g.h;
    Verdict v = make_verdict("gradient_lower_bound_near_gamma", "|grad V| >= 1/diam near Gamma");
    v.measured = {{"annulus_min_grad", lo}};
    v.thresholds = {{"bound", bound}};
    v.status = pass_if(std::isfinite(lo) && lo >= bound);
    return v;
}

namespace {

// Sup of |grad V| on the shorter arc of the level curve between the points
// closest to q1 and q2.
double arc_sup(const ScalarField& field, const VectorField& vf, double c, Vec2 q1, Vec2 q2)
{
    const LevelCurve lc = level_curve(field, c);
    size_t loop = 0, i1 = 0, i2 = 0;
    double best = kInf;
    for (size_t l = 0; l < lc.loops.size(); ++l)
        for (size_t i = 0; i < lc.loops[l].vertices.size(); ++i) {
            const double d = distance(lc.loops[l].vertices[i], q1);
            if (d < best) {
                best = d;
                loop = l;
                i1 = i;
            }
        }
    const auto& v = lc.loops[loop].vertices;
    best = kInf;
    for (size_t i = 0; i < v.size(); ++i) {
        const double d = distance(v[i], q2);
        if (d < best) {
            best = d;
            i2 = i;
        }
    }
    const size_t n = v.size();
    auto walk = [&](size_t from, size_t to, double& len) {
        std::vector<size_t> idx{from};
        len = 0.0;
        for (size_t i = from; i != to; i = (i + 1) % n) {
            len += distance(v[i], v[(i + 1) % n]);
            idx.push_back((i + 1) % n);
        }
        return idx;
    };
    double l1 = 0.0, l2 = 0.0;
    const auto fwd = walk(i1, i2, l1);
    const auto back = walk(i2, i1, l2);
    const auto& arc = l1 <= l2 ? fwd : back;
    double sup = std::max(norm(sample_gradient(vf, q1)), norm(sample_gradient(vf, q2)));
    for (size_t i : arc) sup = std::max(sup, norm(sample_gradient(vf, v[i])));
    return sup;
}

}  // namespace

Verdict speed_level_check(const ScalarField& field, const VectorField& vf, const Streamline& s1,
                          const Streamline& s2, double a, double b, const CheckParams& params)
{
    const Grid& g = *field.grid;
    if (!(a < b)) throw ValidationError("speed_level_check needs a < b");
    Verdict v = make_verdict("speed_on_level_arcs", "the lower level arc has the larger maximum speed");
    v.measured = {{"a", a}, {"b", b}};
    const auto p1a = point_at_level(s1, a), p2a = point_at_level(s2, a);
    const auto p1b = point_at_level(s1, b), p2b = point_at_level(s2, b);
    if (!p1a || !p2a || !p1b || !p2b) {
        v.status = Status::Skipped;
        v.note = "a streamline does not cross both levels";
        return v;
    }
    const auto merged = detect_merge(s1, s2, merge_tol(g, params), params.delta_stop);
    if (merged && merged->level <= b) {
        v.status = Status::Skipped;
        v.note = "StreamlinesMergedInBand: the streamlines merge at level " + std::to_string(merged->level);
        return v;
    }
    const double sup_a = arc_sup(field, vf, a, *p1a, *p2a);
    const double sup_b = arc_sup(field, vf, b, *p1b, *p2b);
    v.measured.push_back({"sup_grad_level_a", sup_a});
    v.measured.push_back({"sup_grad_level_b", sup_b});
    v.thresholds = {{"slack", params.c_grad * g.h}};
    v.status = pass_if(sup_b <= sup_a + params.c_grad * g.h);
    return v;
}

ClCriterionResult cl_criterion(const ScalarField& field, const VectorField& vf, Vec2 xi0,
                               const CheckParams& params, double margin)
{
    const Grid& g = *field.grid;
    const ConvexBody& outer = g.ring.outer;
    const Vec2 foot = closest_boundary_point(outer, xi0);
    if (distance(foot, xi0) > 1e-9 * std::max(1.0, g.sep))
        throw ValidationError("xi0 must lie on the outer boundary");
    ClCriterionResult out;
    GradientLimits& lim = out.limits;
    lim.alpha_window = 6.0 * g.h;
    lim.beta_inner = std::max(4.0 * g.h, g.r_gamma + 3.0 * g.h);
    lim.beta_outer = lim.beta_inner + 4.0 * g.h;
    for (int k = 0; k < static_cast<int>(g.size()); ++k)
        if (g.is_interior(k) && distance(g.node(k), xi0) <= lim.alpha_window)
            lim.alpha = std::max(lim.alpha, norm(vf.values[k]));
    lim.beta = kInf;
    for (int k : gamma_annulus(g)) lim.beta = std::min(lim.beta, norm(vf.values[k]));

    Verdict& v = out.verdict;
    v = make_verdict("cl_criterion", "beta > alpha forces nearby streamlines to meet before Gamma");
    v.measured = {{"alpha", lim.alpha}, {"beta", lim.beta}};
    v.thresholds = {{"margin", margin}};
    if (!(lim.beta > lim.alpha + margin)) {
        v.status = Status::ReportOnly;
        v.note = "criterion not triggered";
        return out;
    }
    const Vec2 in = inward_direction(outer, foot);
    const Vec2 across = perp(in);
    const double tol = merge_tol(g, params);
    const TraceParams tp = trace_params(params);
    for (double cells : {4.0, 2.0}) {
        const double spacing = cells * g.h;
        const Vec2 centre = foot + in * spacing;
        const Vec2 a = centre + across * (0.5 * spacing), b = centre - across * (0.5 * spacing);
        Streamline sa = trace_ascending(field, vf, a, tp), sb = trace_ascending(field, vf, b, tp);
        sb.id = 1;
        const auto m = detect_merge(sa, sb, tol, params.delta_stop);
        if (m) {
            v.measured.push_back({"seed_spacing", spacing});
            v.measured.push_back({"merge_level", m->level});
            v.status = Status::Pass;
            if (cells != 4.0) v.note = "merge found at 2h seed spacing, not at 4h";
            return out;
        }
    }
    v.status = Status::Fail;
    v.note = "seeded pair did not merge below 1 - delta_stop";
    return out;
}

Verdict theorem_single_check(const ScalarField& field, const VectorField& vf, const CheckParams& params,
                             int samples)
{
    const Grid& g = *field.grid;
    const auto* pt = g.ring.inner.as<PointShape>();
    if (!pt) throw NotAPoint("single-point theorem check needs a point inner boundary");
    Verdict v = make_verdict("off_disk_streamlines_merge",
                             "streamlines leaving the largest disk around Gamma meet others before Gamma");
    if (is_stadium(g.ring)) {
        v.status = Status::Skipped;
        v.note = "IsAStadium: no merges are predicted";
        return v;
    }
    const double reach = g.sep + 4.0 * g.h;
    std::vector<Vec2> seeds;
    std::vector<int> qualifying;
    for (int n = samples; n <= 4096; n *= 2) {
        seeds.clear();
        qualifying.clear();
        for (int k = 0; k < n; ++k) {
            seeds.push_back(boundary_point_at(g.ring.outer, (k + 0.5) / n));
            if (distance(seeds.back(), pt->center) > reach) qualifying.push_back(k);
        }
        if (qualifying.size() >= 8) break;
    }
    const auto lines = trace_all(field, vf, seeds, trace_params(params));
    const double tol = merge_tol(g, params);
    const int n = static_cast<int>(seeds.size());
    int merged = 0;
    double worst_level = 0.0;
    for (int k : qualifying) {
        double level = kInf;
        for (int nb : {(k + n - 1) % n, (k + 1) % n})
            if (auto m = detect_merge(lines[k], lines[nb], tol, params.delta_stop))
                level = std::min(level, m->level);
        if (std::isfinite(level)) {
            ++merged;
            worst_level = std::max(worst_level, level);
        }
    }
    v.measured = {{"seeds", double(qualifying.size())}, {"merged", double(merged)},
                  {"highest_merge_level", worst_level}};
    v.thresholds = {{"min_seeds", 8.0}, {"level_limit", 1.0 - params.delta_stop}};
    v.status = pass_if(qualifying.size() >= 8 && merged == static_cast<int>(qualifying.size()));
    return v;
}

Verdict hr_glued_check(const ConvexRing& ring, double h, const SolveParams& solve, const CheckParams& params,
                       double r_gamma)
{
    const auto* seg = ring.inner.as<SegmentShape>();
    if (!seg) throw GammaNotOnRidge("the inner boundary is not a segment");
    const HighRidge ridge = high_ridge(ring.outer);
    const double R = ridge.clearance;
    const double tol = 1e-6 * std::max(1.0, R);
    if (std::abs(boundary_distance(ring.outer, seg->a) - R) > tol ||
        std::abs(boundary_distance(ring.outer, seg->b) - R) > tol)
        throw GammaNotOnRidge("the segment is not on the high ridge");

    const Vec2 centre = (seg->a + seg->b) * 0.5;
    const Vec2 e1 = normalized(seg->b - seg->a), e2 = perp(e1);
    const double half = 0.5 * distance(seg->a, seg->b);

    const GridPtr grid = build_grid(ring, h, r_gamma);
    const GridPtr grid_l = build_grid(make_ring(ring.outer, ConvexBody::point(seg->a)), h, r_gamma);
    const GridPtr grid_r = build_grid(make_ring(ring.outer, ConvexBody::point(seg->b)), h, r_gamma);
    if (grid_l->nx != grid->nx || grid_r->nx != grid->nx || grid_l->ny != grid->ny || grid_r->ny != grid->ny)
        throw NumericalError("gluing grids do not share a lattice");
    const ScalarField V = solve_infinity(grid, solve);
    const ScalarField uL = solve_infinity(grid_l, solve);
    const ScalarField uR = solve_infinity(grid_r, solve);

    double glue_err = 0.0, rect_err = 0.0;
    for (int k = 0; k < static_cast<int>(grid->size()); ++k) {
        if (!grid->is_interior(k)) continue;
        const Vec2 x = grid->node(k);
        const double x1 = dot(x - centre, e1), x2 = dot(x - centre, e2);
        double glued;
        if (x1 >= half) {
            glued = uR.values[k];
        } else if (x1 <= -half) {
            glued = uL.values[k];
        } else {
            glued = grid->outer_distance(x) / R;
            rect_err = std::max(rect_err, std::abs(V.values[k] - (1.0 - std::abs(x2) / R)));
        }
        glue_err = std::max(glue_err, std::abs(V.values[k] - glued));
    }

    Verdict v = make_verdict("high_ridge_gluing",
                             "V is glued from the end-point potentials and the distance function");
    v.measured = {{"glued_error", glue_err}, {"rectangle_error", rect_err}};
    v.thresholds = {{"glued_tolerance", 0.03}, {"rectangle_tolerance", 0.02}};
    bool ok = glue_err <= 0.03 && rect_err <= 0.02;
    if (!is_stadium(ring)) {
        const VectorField vf = gradient(V);
        const auto lines = trace_all(V, vf, boundary_seeds(ring.outer, params.seeds_per_side),
                                     trace_params(params));
        const double tm = merge_tol(*grid, params);
        const auto merges = pairwise_merges(lines, tm, params.delta_stop);
        v.measured.push_back({"merges", double(merges.size())});
        v.note = "not a stadium: streamlines must meet";
        ok = ok && !merges.empty();
    } else {
        v.note = "stadium: no merge assertion";
    }
    v.status = pass_if(ok);
    return v;
}

std::vector<Verdict> square_suite(const ScalarField& field, const VectorField& vf, const CheckParams& params)
{
    const Grid& g = *field.grid;
    const auto* poly = g.ring.outer.as<PolygonShape>();
    const auto* pt = g.ring.inner.as<PointShape>();
    auto is_square = [&] {
        if (!poly || !pt || poly->vertices.size() != 4 || norm(pt->center) > 1e-12) return false;
        for (const Vec2& c : poly->vertices)
            if (std::abs(std::abs(c.x) - 1.0) > 1e-12 || std::abs(std::abs(c.y) - 1.0) > 1e-12) return false;
        return true;
    };
    if (!is_square()) throw WrongFixture("square suite needs the square [-1,1]^2 with Gamma at the origin");

    const double h = g.h;
    const double tol = merge_tol(g, params);
    const TraceParams tp = trace_params(params);
    const double top = 1.0 - params.delta_stop;
    const std::vector<Vec2> corners{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    std::vector<Verdict> out;

    {
        double lower = kInf, upper = kInf;
        for (int k = 0; k < static_cast<int>(g.size()); ++k) {
            if (!g.is_interior(k)) continue;
            const Vec2 x = g.node(k);
            lower = std::min(lower, field.values[k] - (1.0 - norm(x)));
            upper = std::min(upper, g.outer_distance(x) - field.values[k]);
        }
        Verdict v = make_verdict("sandwich", "1 - |x| <= V(x) <= dist(x, boundary)");
        v.measured = {{"min_V_minus_lower", lower}, {"min_upper_minus_V", upper}};
        v.thresholds = {{"slack", 0.02}};
        v.status = pass_if(lower >= -0.02 && upper >= -0.02);
        out.push_back(v);
    }
    {
        double err = 0.0;
        for (int k = 0; k < static_cast<int>(g.size()); ++k) {
            if (!g.is_interior(k)) continue;
            const Vec2 x = g.node(k);
            if (std::abs(x.x) < 0.25 * h) err = std::max(err, std::abs(field.values[k] - (1.0 - std::abs(x.y))));
            if (std::abs(x.y) < 0.25 * h) err = std::max(err, std::abs(field.values[k] - (1.0 - std::abs(x.x))));
        }
        Verdict v = make_verdict("median_linearity", "V is linear on the medians");
        v.measured = {{"max_error", err}};
        v.thresholds = {{"tolerance", 0.02}};
        v.status = pass_if(err <= 0.02);
        out.push_back(v);
    }
    {
        double worst = 0.0;
        for (int k = 0; k < static_cast<int>(g.size()); ++k) {
            if (!g.is_interior(k)) continue;
            for (const Vec2& c : corners)
                if (distance(g.node(k), c) <= 2.0 * h + 1e-12) worst = std::max(worst, norm(vf.values[k]));
        }
        Verdict v = make_verdict("corner_gradient", "grad V vanishes at the corners");
        v.measured = {{"max_grad_near_corners", worst}};
        v.thresholds = {{"bound", 0.15}};
        v.status = pass_if(worst <= 0.15);
        out.push_back(v);
    }
    {
        // Speed sampled on the diagonal nodes from each corner towards Gamma.
        double backslide = 0.0;
        for (const Vec2& c : corners) {
            double running = 0.0;
            const Vec2 step = c * (-h);
            for (int q = 0;; ++q) {
                const Vec2 x = c + step * q;
                if (dot(x, c) <= 0.0) break;
                const int i = static_cast<int>(std::lround((x.x - g.origin.x) / h));
                const int j = static_cast<int>(std::lround((x.y - g.origin.y) / h));
                const int k = g.index(i, j);
                if (!g.is_interior(k) || g.gamma_distance(x) < 4.0 * h) continue;
                const double s = norm(vf.values[k]);
                backslide = std::max(backslide, running - s);
                running = std::max(running, s);
            }
        }
        Verdict v = make_verdict("diagonal_speed_monotone", "the speed is non-decreasing on the diagonals");
        v.measured = {{"max_backslide", backslide}};
        v.thresholds = {{"tolerance", 0.02}};
        v.status = pass_if(backslide <= 0.02);
        out.push_back(v);
    }
    {
        double worst = 0.0;
        const std::vector<std::pair<double, double>> maps{{1, 1}, {-1, 1}, {1, -1}, {-1, -1}};
        for (int k = 0; k < static_cast<int>(g.size()); ++k) {
            if (!g.is_interior(k)) continue;
            const Vec2 x = g.node(k);
            for (bool swap : {false, true})
                for (const auto& [sx, sy] : maps) {
                    const Vec2 y = swap ? Vec2{sx * x.y, sy * x.x} : Vec2{sx * x.x, sy * x.y};
                    worst = std::max(worst, std::abs(field.values[k] - sample(field, y)));
                }
        }
        Verdict v = make_verdict("dihedral_symmetry", "V inherits the symmetries of the square");
        v.measured = {{"max_deviation", worst}};
        v.thresholds = {{"tolerance", 10.0 * params.tol_res}};
        v.status = pass_if(worst <= 10.0 * params.tol_res);
        out.push_back(v);
    }

    // Streamlines: boundary seeds, plus corner (diagonal) and median seeds.
    const std::vector<Vec2> side_seeds = boundary_seeds(g.ring.outer, params.seeds_per_side);
    std::vector<Vec2> seeds = side_seeds;
    for (const Vec2& c : corners) seeds.push_back(c);
    for (const Vec2& m : std::vector<Vec2>{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}) seeds.push_back(m);
    const auto lines = trace_all(field, vf, seeds, tp);
    const auto merges = pairwise_merges(lines, tol, params.delta_stop);
    {
        std::vector<double> first(lines.size(), kInf);
        for (const ClPoint& m : merges) {
            first[m.first] = std::min(first[m.first], m.level);
            first[m.second] = std::min(first[m.second], m.level);
        }
        int unmerged = 0;
        double highest = 0.0;
        for (size_t i = 0; i < side_seeds.size(); ++i) {
            const Vec2 s = side_seeds[i];
            if (std::abs(s.x) < 1e-12 || std::abs(s.y) < 1e-12) continue;  // median seeds
            if (!std::isfinite(first[i])) ++unmerged;
            else highest = std::max(highest, first[i]);
        }
        Verdict v = make_verdict("boundary_seeds_merge", "every streamline except the medians meets another");
        v.measured = {{"seeds", double(side_seeds.size())}, {"unmerged", double(unmerged)},
                      {"highest_first_merge_level", highest}};
        v.thresholds = {{"level_limit", top}};
        v.status = pass_if(unmerged == 0);
        out.push_back(v);
    }

    std::vector<Vec2> all_cl;
    for (const ClPoint& m : merges) all_cl.push_back(m.location);
    {
        // Dense seeds on the two edges at each corner.
        int weakest = std::numeric_limits<int>::max();
        for (const Vec2& c : corners) {
            std::vector<Vec2> cs{c};
            for (int q = 1; q <= 8; ++q) {
                const double d = 0.02 * q;
                cs.push_back({c.x - c.x * d, c.y});
                cs.push_back({c.x, c.y - c.y * d});
            }
            const auto local = trace_all(field, vf, cs, tp);
            std::vector<Vec2> inside;
            for (const ClPoint& m : pairwise_merges(local, tol, params.delta_stop)) {
                all_cl.push_back(m.location);
                if (std::abs(m.location.x - c.x) <= 0.25 && std::abs(m.location.y - c.y) <= 0.25)
                    inside.push_back(m.location);
            }
            weakest = std::min(weakest, static_cast<int>(distinct_points(inside, tol).size()));
        }
        Verdict v = make_verdict("corner_cl_points", "there are infinitely many Cl-points near the corners");
        v.measured = {{"min_distinct_per_corner_window", double(weakest)}};
        v.thresholds = {{"min_count", 3.0}, {"window_side", 0.25}};
        v.status = pass_if(weakest >= 3);
        out.push_back(v);
    }
    {
        std::vector<Vec2> high;
        for (const ClPoint& m : merges)
            if (m.level > 0.8) high.push_back(m.location);
        const size_t count = distinct_points(high, tol).size();
        Verdict v = make_verdict("origin_cl_points", "there are infinitely many Cl-points near the origin");
        v.measured = {{"distinct_above_level", double(count)}};
        v.thresholds = {{"min_count", 3.0}, {"level", 0.8}};
        v.status = pass_if(count >= 3);
        out.push_back(v);
    }
    {
        double worst = 0.0, sum = 0.0;
        for (const Vec2& p : all_cl) {
            const double d = std::min(std::abs(p.x - p.y), std::abs(p.x + p.y)) / std::sqrt(2.0);
            worst = std::max(worst, d);
            sum += d;
        }
        Verdict v = make_verdict("cl_points_on_diagonals", "conjecture: the only Cl-points lie on the diagonals");
        v.measured = {{"cl_points", double(all_cl.size())}, {"max_distance_to_diagonal", worst},
                      {"mean_distance_to_diagonal", all_cl.empty() ? 0.0 : sum / all_cl.size()}};
        v.status = Status::ReportOnly;
        out.push_back(v);
    }
    {
        double lo = kInf;
        for (int k : clear_nodes(g, 2.0 * h))
            if (field.values[k] > 0.0) lo = std::min(lo, norm(vf.values[k]) / field.values[k]);
        Verdict v = make_verdict("log_gradient_at_least_one", "open question: is |grad log V| >= 1 in the square");
        v.measured = {{"min_grad_log_V", lo}};
        v.thresholds = {{"reference", 1.0}};
        v.status = Status::ReportOnly;
        out.push_back(v);
    }
    return out;
}

}  // namespace ringflow
