#include "ringflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "ringflow/errors.hpp"

namespace ringflow {

std::string to_string(Termination t)
{
    switch (t) {
        case Termination::ReachedGamma: return "REACHED_GAMMA";
        case Termination::ReachedOuter: return "REACHED_OUTER";
        case Termination::Stalled: return "STALLED";
        case Termination::LeftDomain: return "LEFT_DOMAIN";
    }
    return "UNKNOWN";
}

namespace {

class Tracer {
public:
    Tracer(const ScalarField& field, const VectorField& vf, const TraceParams& params, double sign)
        : field_(field), vf_(vf), g_(*field.grid), params_(params), sign_(sign)
    {
        if (vf.grid.get() != field.grid.get() && (vf.grid->h != g_.h || vf.grid->nx != g_.nx))
            throw ValidationError("field and gradient live on different grids");
        if (!(params.delta_stop > 0.0 && params.delta_stop < 1.0))
            throw ValidationError("delta_stop must lie in (0, 1)");
        const double cap = 0.5 * g_.h;
        max_step_ = params.max_step > 0.0 ? std::min(params.max_step, cap) : cap;
        eps_speed_ = params.eps_speed > 0.0 ? params.eps_speed : 1e-6 / g_.sep;
        gamma_stop_ = std::max(2.0 * g_.h, g_.r_gamma);
        const double span = (g_.nx + g_.ny) * g_.h;
        max_vertices_ = static_cast<size_t>(20.0 * span / max_step_) + 100;
    }

    Streamline run(Vec2 seed)
    {
        Streamline line;
        line.seed = seed;
        const ConvexBody& outer = g_.ring.outer;
        const ConvexBody& inner = g_.ring.inner;
        const double eps = 1e-9 * std::max(1.0, g_.sep);
        if (signed_distance(outer, seed) > eps ||
            (inner.has_interior() && signed_distance(inner, seed) < -eps))
            throw SeedOutOfDomain("seed lies outside the closed ring");

        Vec2 x = seed;
        if (boundary_distance(outer, seed) <= eps) {
            push(line, seed, 0.0, speed_at(seed));
            if (ascending()) {
                // Boundary seeds (corners in particular) can sit on a vanishing
                // gradient; walk inward along the bisector/normal first.
                const Vec2 inward = inward_direction(outer, closest_boundary_point(outer, seed));
                const double nudge = params_.corner_nudge * g_.h;
                const int pieces = std::max(1, static_cast<int>(std::ceil(nudge / max_step_)));
                for (int q = 1; q <= pieces; ++q) {
                    const Vec2 y = seed + inward * (nudge * q / pieces);
                    const double v = value_at(y);
                    if (v > line.V.back()) push(line, y, v, speed_at(y));
                }
                x = line.vertices.back();
            } else {
                line.termination = Termination::ReachedOuter;
                return line;
            }
        } else {
            double v = 0.0;
            try {
                v = sample(field_, x);
            } catch (const OutOfDomain&) {
                throw SeedOutOfDomain("seed lies outside the sampled lattice");
            }
            push(line, x, v, speed_at(x));
        }
        integrate(line);
        return line;
    }

private:
    bool ascending() const { return sign_ > 0.0; }

    double value_at(Vec2 x) const { return sample(field_, x); }

    double speed_at(Vec2 x) const
    {
        try {
            return norm(sample_gradient(vf_, x));
        } catch (const OutOfDomain&) {
            return 0.0;
        }
    }

    // Unit flow direction; false where the gradient cannot be sampled or vanishes.
    bool direction(Vec2 x, Vec2& d) const
    {
        Vec2 gr;
        try {
            gr = sample_gradient(vf_, x);
        } catch (const OutOfDomain&) {
            return false;
        }
        const double n = norm(gr);
        if (!(n > 0.0) || !std::isfinite(n)) return false;
        d = gr * (sign_ / n);
        return true;
    }

    static void push(Streamline& line, Vec2 x, double v, double speed)
    {
        const double s = line.vertices.empty() ? 0.0 : line.s.back() + distance(line.vertices.back(), x);
        line.vertices.push_back(x);
        line.s.push_back(s);
        line.V.push_back(v);
        line.speed.push_back(speed);
    }

    bool reached_gamma(Vec2 x, double v) const
    {
        return g_.gamma_distance(x) < gamma_stop_ || v >= 1.0 - params_.delta_stop;
    }

    // Point where the segment [x, y] leaves the outer body (x inside).
    Vec2 exit_point(Vec2 x, Vec2 y) const
    {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (contains(g_.ring.outer, x + (y - x) * mid)) lo = mid; else hi = mid;
        }
        return x + (y - x) * lo;
    }

    void integrate(Streamline& line)
    {
        const double cos_turn = std::cos(params_.max_turn);
        const double min_step = max_step_ / 1024.0;
        double step = max_step_;
        int slow = 0;
        while (true) {
            const Vec2 x = line.vertices.back();
            const double v = line.V.back();
            if (ascending() && reached_gamma(x, v)) {
                line.termination = Termination::ReachedGamma;
                return;
            }
            if (line.vertices.size() >= max_vertices_) {
                line.termination = Termination::Stalled;
                return;
            }
            if (line.speed.back() < eps_speed_) {
                if (++slow > params_.stall_budget) {
                    line.termination = Termination::Stalled;
                    return;
                }
            } else {
                slow = 0;
            }
            Vec2 k1;
            if (!direction(x, k1)) {
                line.termination = line.speed.back() > 0.0 ? Termination::LeftDomain : Termination::Stalled;
                return;
            }
            bool left = false;
            bool accepted = false;
            while (step >= min_step) {
                Vec2 k2, k3, k4;
                const bool ok = direction(x + k1 * (0.5 * step), k2) &&
                                direction(x + k2 * (0.5 * step), k3) &&
                                direction(x + k3 * step, k4);
                if (ok && dot(k1, k2) >= cos_turn && dot(k1, k3) >= cos_turn && dot(k1, k4) >= cos_turn) {
                    const Vec2 y = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (step / 6.0);
                    const bool inside = signed_distance(g_.ring.outer, y) < 0.0;
                    if (!ascending() && !inside) {
                        push(line, exit_point(x, y), 0.0, line.speed.back());
                        line.termination = Termination::ReachedOuter;
                        return;
                    }
                    left = !inside;
                    if (inside) {
                        double vy = 0.0;
                        bool sampled = true;
                        try {
                            vy = value_at(y);
                        } catch (const OutOfDomain&) {
                            sampled = false;
                        }
                        if (sampled && (ascending() ? vy > v : vy < v)) {
                            if (!ascending() && vy <= 0.0) {
                                push(line, y, 0.0, speed_at(y));
                                line.termination = Termination::ReachedOuter;
                                return;
                            }
                            push(line, y, vy, speed_at(y));
                            accepted = true;
                            break;
                        }
                    }
                }
                step *= 0.5;
            }
            if (!accepted) {
                line.termination = left ? Termination::LeftDomain : Termination::Stalled;
                return;
            }
            step = std::min(max_step_, 2.0 * step);
        }
    }

    const ScalarField& field_;
    const VectorField& vf_;
    const Grid& g_;
    TraceParams params_;
    double sign_;
    double max_step_ = 0.0;
    double eps_speed_ = 0.0;
    double gamma_stop_ = 0.0;
    size_t max_vertices_ = 0;
};

// Index of the last vertex with V <= c, for c inside the level range.
size_t level_segment(const Streamline& line, double c)
{
    const auto it = std::upper_bound(line.V.begin(), line.V.end(), c);
    const size_t i = static_cast<size_t>(it - line.V.begin());
    return i == 0 ? 0 : std::min(i - 1, line.V.size() - 2);
}

double level_fraction(const Streamline& line, size_t i, double c)
{
    const double dv = line.V[i + 1] - line.V[i];
    return dv > 0.0 ? std::clamp((c - line.V[i]) / dv, 0.0, 1.0) : 0.0;
}

bool in_level_range(const Streamline& line, double c)
{
    return !line.V.empty() && c >= line.V.front() && c <= line.V.back();
}

Vec2 point_at_arclength(const Streamline& line, double s)
{
    if (s <= 0.0) return line.vertices.front();
    if (s >= line.s.back()) return line.vertices.back();
    const auto it = std::upper_bound(line.s.begin(), line.s.end(), s);
    const size_t i = static_cast<size_t>(it - line.s.begin()) - 1;
    const double ds = line.s[i + 1] - line.s[i];
    const double t = ds > 0.0 ? (s - line.s[i]) / ds : 0.0;
    return line.vertices[i] + (line.vertices[i + 1] - line.vertices[i]) * t;
}

// Proper crossing of segments pq and rs; writes the crossing parameter on pq.
bool proper_crossing(Vec2 p, Vec2 q, Vec2 r, Vec2 s, double& t)
{
    const double d1 = cross(q - p, r - p), d2 = cross(q - p, s - p);
    const double d3 = cross(s - r, p - r), d4 = cross(s - r, q - r);
    if (!((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))) return false;
    if (!((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))) return false;
    t = d3 / (d3 - d4);
    return true;
}

}  // namespace

Streamline trace_ascending(const ScalarField& field, const VectorField& vf, Vec2 seed,
                           const TraceParams& params)
{
    return Tracer(field, vf, params, 1.0).run(seed);
}

Streamline trace_descending(const ScalarField& field, const VectorField& vf, Vec2 seed,
                            const TraceParams& params)
{
    return Tracer(field, vf, params, -1.0).run(seed);
}

std::vector<Streamline> trace_all(const ScalarField& field, const VectorField& vf,
                                  const std::vector<Vec2>& seeds, const TraceParams& params)
{
    std::vector<Streamline> out(seeds.size());
    std::vector<std::string> errors(seeds.size());
    const int n = static_cast<int>(seeds.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        try {
            out[i] = trace_ascending(field, vf, seeds[i], params);
            out[i].id = i;
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (int i = 0; i < n; ++i)
        if (!errors[i].empty()) throw SeedOutOfDomain("seed " + std::to_string(i) + ": " + errors[i]);
    return out;
}

std::optional<Vec2> point_at_level(const Streamline& line, double c)
{
    if (!in_level_range(line, c)) return std::nullopt;
    if (line.V.size() == 1) return line.vertices.front();
    const size_t i = level_segment(line, c);
    const double t = level_fraction(line, i, c);
    return line.vertices[i] + (line.vertices[i + 1] - line.vertices[i]) * t;
}

std::optional<double> arclength_at_level(const Streamline& line, double c)
{
    if (!in_level_range(line, c)) return std::nullopt;
    if (line.V.size() == 1) return line.s.front();
    const size_t i = level_segment(line, c);
    const double t = level_fraction(line, i, c);
    return line.s[i] + (line.s[i + 1] - line.s[i]) * t;
}

std::optional<ClPoint> detect_merge(const Streamline& a, const Streamline& b, double tol_merge,
                                    double delta_stop)
{
    if (a.V.empty() || b.V.empty()) return std::nullopt;
    const double lo = std::max(a.V.front(), b.V.front());
    const double hi = std::min(a.V.back(), b.V.back());
    if (lo > hi) return std::nullopt;
    std::vector<double> levels{lo, hi};
    for (const auto* line : {&a, &b})
        for (double v : line->V)
            if (v > lo && v < hi) levels.push_back(v);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    // Walk down from the common top level while the traces stay together.
    std::optional<double> merged;
    Vec2 pa, pb;
    for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
        const Vec2 qa = *point_at_level(a, *it);
        const Vec2 qb = *point_at_level(b, *it);
        if (distance(qa, qb) > tol_merge) break;
        merged = *it;
        pa = qa;
        pb = qb;
    }
    if (!merged || *merged >= 1.0 - delta_stop) return std::nullopt;
    ClPoint cp;
    cp.location = (pa + pb) * 0.5;
    cp.level = *merged;
    cp.first = a.id;
    cp.second = b.id;
    cp.s_first = *arclength_at_level(a, *merged);
    cp.s_second = *arclength_at_level(b, *merged);
    return cp;
}

std::optional<int> MergeTree::parent(int id) const
{
    for (const MergeEdge& e : edges)
        if (e.child == id) return e.parent;
    return std::nullopt;
}

MergeTree merge_tree(const std::vector<Streamline>& lines, double tol_merge, double delta_stop)
{
    const size_t n = lines.size();
    MergeTree tree;
    struct Best {
        int other = -1;
        ClPoint point;
    };
    std::vector<Best> best(n);
    for (size_t i = 0; i < n; ++i) {
        tree.nodes.push_back(lines[i].id);
        for (size_t j = i + 1; j < n; ++j) {
            const auto m = detect_merge(lines[i], lines[j], tol_merge, delta_stop);
            if (!m) continue;
            tree.merges.push_back(*m);
            // Ties keep the lower partner index, which was seen first.
            if (best[i].other < 0 || m->level < best[i].point.level) best[i] = {static_cast<int>(j), *m};
            if (best[j].other < 0 || m->level < best[j].point.level) best[j] = {static_cast<int>(i), *m};
        }
    }
    std::vector<int> parent(n, -1);
    for (size_t i = 0; i < n; ++i) parent[i] = best[i].other;

    // Break cycles at their smallest index so the result is a forest.
    std::vector<int> state(n, 0);  // 0 unseen, 1 on the current path, 2 done
    for (size_t start = 0; start < n; ++start) {
        if (state[start] != 0) continue;
        std::vector<int> path;
        int v = static_cast<int>(start);
        while (v >= 0 && state[v] == 0) {
            state[v] = 1;
            path.push_back(v);
            v = parent[v];
        }
        if (v >= 0 && state[v] == 1) {
            int smallest = v;
            for (int u = parent[v]; u != v; u = parent[u]) smallest = std::min(smallest, u);
            parent[smallest] = -1;
        }
        for (int u : path) state[u] = 2;
    }
    for (size_t i = 0; i < n; ++i) {
        if (parent[i] < 0) {
            tree.roots.push_back(lines[i].id);
            continue;
        }
        tree.edges.push_back({lines[i].id, lines[parent[i]].id, best[i].point});
    }
    return tree;
}

bool crossing_check(const Streamline& a, const Streamline& b, double tol_merge)
{
    if (a.vertices.size() < 2 || b.vertices.size() < 2) return false;
    const auto merge = detect_merge(a, b, tol_merge, 0.0);
    const double cut = merge ? merge->level : std::numeric_limits<double>::infinity();

    // Bucket b's segments on a coarse lattice to avoid the quadratic scan.
    double cell = 0.0;
    for (size_t j = 0; j + 1 < b.vertices.size(); ++j)
        cell = std::max(cell, distance(b.vertices[j], b.vertices[j + 1]));
    cell = std::max(cell, 1e-12);
    auto key = [&](Vec2 p) {
        const auto ix = static_cast<long long>(std::floor(p.x / cell));
        const auto iy = static_cast<long long>(std::floor(p.y / cell));
        return (ix << 32) ^ (iy & 0xffffffffLL);
    };
    std::unordered_map<long long, std::vector<size_t>> buckets;
    for (size_t j = 0; j + 1 < b.vertices.size(); ++j) buckets[key(b.vertices[j])].push_back(j);

    auto near_end = [&](Vec2 p) {
        return distance(p, a.vertices.front()) <= tol_merge || distance(p, a.vertices.back()) <= tol_merge ||
               distance(p, b.vertices.front()) <= tol_merge || distance(p, b.vertices.back()) <= tol_merge;
    };
    for (size_t i = 0; i + 1 < a.vertices.size(); ++i) {
        const Vec2 p = a.vertices[i], q = a.vertices[i + 1];
        const auto ix = static_cast<long long>(std::floor(p.x / cell));
        const auto iy = static_cast<long long>(std::floor(p.y / cell));
        const long long reach = 2 + static_cast<long long>(std::ceil(distance(p, q) / cell));
        for (long long dy = -reach; dy <= reach; ++dy) {
            for (long long dx = -reach; dx <= reach; ++dx) {
                const auto found = buckets.find(((ix + dx) << 32) ^ ((iy + dy) & 0xffffffffLL));
                if (found == buckets.end()) continue;
                for (size_t j : found->second) {
                    double t = 0.0;
                    if (!proper_crossing(p, q, b.vertices[j], b.vertices[j + 1], t)) continue;
                    const Vec2 x = p + (q - p) * t;
                    const double level = a.V[i] + (a.V[i + 1] - a.V[i]) * t;
                    if (level >= cut || near_end(x)) continue;
                    return true;
                }
            }
        }
    }
    return false;
}

double refinement_consistency(const ScalarField& field, const VectorField& vf, Vec2 seed,
                              const TraceParams& params)
{
    const double h = field.grid->h;
    TraceParams coarse = params, fine = params;
    coarse.max_step = 0.5 * h;
    fine.max_step = 0.25 * h;
    const Streamline a = trace_ascending(field, vf, seed, coarse);
    const Streamline b = trace_ascending(field, vf, seed, fine);
    const double common = std::min(a.length(), b.length());
    double worst = 0.0;
    for (const auto* line : {&a, &b}) {
        const Streamline& other = line == &a ? b : a;
        for (size_t i = 0; i < line->vertices.size(); ++i) {
            if (line->s[i] > common) break;
            worst = std::max(worst, distance(line->vertices[i], point_at_arclength(other, line->s[i])));
        }
    }
    return worst;
}

double default_merge_tolerance(const Grid& grid) { return grid.h; }

std::vector<Vec2> boundary_seeds(const ConvexBody& outer, int n, double offset)
{
    if (n < 1) throw ValidationError("seed count must be positive");
    std::vector<Vec2> out;
    if (const auto* poly = outer.as<PolygonShape>()) {
        const auto& v = poly->vertices;
        for (size_t e = 0; e < v.size(); ++e) {
            const Vec2 a = v[e], b = v[(e + 1) % v.size()];
            for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * ((k + offset) / n));
        }
        return out;
    }
    for (int k = 0; k < 4 * n; ++k) out.push_back(boundary_point_at(outer, (k + offset) / (4.0 * n)));
    return out;
}

}  // namespace ringflow
