#include "ringflow/field.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "ringflow/errors.hpp"

namespace ringflow {

namespace {

NodeClass classify(const ConvexRing& ring, const ConvexBody& obstacle, Vec2 x, double h)
{
    if (contains(obstacle, x)) return NodeClass::InnerBc;
    const double sd = signed_distance(ring.outer, x);
    if (sd < -1e-12) return NodeClass::Interior;
    if (sd <= 2.0 * h) return NodeClass::OuterBc;
    return NodeClass::Exterior;
}

bool interior_connected(const Grid& g)
{
    const int n = static_cast<int>(g.size());
    int first = -1, count = 0;
    for (int k = 0; k < n; ++k) {
        if (g.is_interior(k)) {
            if (first < 0) first = k;
            ++count;
        }
    }
    if (count == 0) return false;
    std::vector<char> seen(g.size(), 0);
    std::deque<int> queue{first};
    seen[first] = 1;
    int reached = 0;
    while (!queue.empty()) {
        const int k = queue.front();
        queue.pop_front();
        ++reached;
        const int i = g.col(k), j = g.row(k);
        const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
        for (const auto& q : nb) {
            if (q[0] < 0 || q[1] < 0 || q[0] >= g.nx || q[1] >= g.ny) continue;
            const int m = g.index(q[0], q[1]);
            if (!seen[m] && g.is_interior(m)) {
                seen[m] = 1;
                queue.push_back(m);
            }
        }
    }
    return reached == count;
}

// Bilinear lookup with the nearest-usable-cell fallback, shared by the scalar
// and vector samplers.
template <class T, class Usable>
T interpolate(const Grid& g, const std::vector<T>& values, Vec2 x, Usable usable)
{
    const double fx = (x.x - g.origin.x) / g.h;
    const double fy = (x.y - g.origin.y) / g.h;
    const double slack = 1e-9;
    if (!(fx >= -slack && fy >= -slack && fx <= g.nx - 1 + slack && fy <= g.ny - 1 + slack))
        throw OutOfDomain("point outside the lattice");
    const int ci = std::clamp(static_cast<int>(std::floor(fx)), 0, g.nx - 2);
    const int cj = std::clamp(static_cast<int>(std::floor(fy)), 0, g.ny - 2);

    auto cell_ok = [&](int i, int j) {
        if (i < 0 || j < 0 || i > g.nx - 2 || j > g.ny - 2) return false;
        return usable(g.index(i, j)) && usable(g.index(i + 1, j)) && usable(g.index(i, j + 1)) &&
               usable(g.index(i + 1, j + 1));
    };
    auto eval = [&](int i, int j) {
        const double s = fx - i, t = fy - j;
        const T& v00 = values[g.index(i, j)];
        const T& v10 = values[g.index(i + 1, j)];
        const T& v01 = values[g.index(i, j + 1)];
        const T& v11 = values[g.index(i + 1, j + 1)];
        return v00 * ((1.0 - s) * (1.0 - t)) + v10 * (s * (1.0 - t)) + v01 * ((1.0 - s) * t) +
               v11 * (s * t);
    };
    if (cell_ok(ci, cj)) return eval(ci, cj);

    constexpr int kReach = 3;
    double best = std::numeric_limits<double>::infinity();
    int bi = -1, bj = -1;
    for (int j = cj - kReach; j <= cj + kReach; ++j) {
        for (int i = ci - kReach; i <= ci + kReach; ++i) {
            if (!cell_ok(i, j)) continue;
            const double dx = fx - (i + 0.5), dy = fy - (j + 0.5);
            const double d2 = dx * dx + dy * dy;
            if (d2 < best) {
                best = d2;
                bi = i;
                bj = j;
            }
        }
    }
    if (bi < 0) throw OutOfDomain("no usable cell near the query point");
    return eval(bi, bj);
}

}  // namespace

GridPtr build_grid(const ConvexRing& ring, double h, double r_gamma)
{
    const double sep = separation(ring);
    if (!(h > 0.0) || !(h < sep / 8.0))
        throw ValidationError("grid spacing must satisfy 0 < h < separation/8");
    const BoundingBox bb = bounding_box(ring.outer);
    const int i0 = static_cast<int>(std::floor((bb.lo.x - 2.0 * h) / h));
    const int j0 = static_cast<int>(std::floor((bb.lo.y - 2.0 * h) / h));
    const int i1 = static_cast<int>(std::ceil((bb.hi.x + 2.0 * h) / h));
    const int j1 = static_cast<int>(std::ceil((bb.hi.y + 2.0 * h) / h));

    auto g = std::make_shared<Grid>(Grid{ring, {h * i0, h * j0}, h, i1 - i0 + 1, j1 - j0 + 1,
                                         std::max(h, r_gamma), sep, {}});
    const ConvexBody obstacle = g->inner_obstacle();
    g->cls.resize(static_cast<size_t>(g->nx) * g->ny);
    for (int j = 0; j < g->ny; ++j)
        for (int i = 0; i < g->nx; ++i)
            g->cls[g->index(i, j)] = classify(ring, obstacle, {h * (i0 + i), h * (j0 + j)}, h);
    if (!interior_connected(*g))
        throw TooCoarse("interior node set is empty or not edge-connected");
    return g;
}

GridPtr make_grid(const ConvexRing& ring, Vec2 origin, double h, int nx, int ny, double r_gamma,
                  std::vector<NodeClass> cls)
{
    if (cls.size() != static_cast<size_t>(nx) * ny)
        throw ValidationError("node class count does not match lattice size");
    return std::make_shared<Grid>(
        Grid{ring, origin, h, nx, ny, r_gamma, separation(ring), std::move(cls)});
}

VectorField gradient(const ScalarField& field)
{
    const Grid& g = *field.grid;
    const auto& u = field.values;
    VectorField out{field.grid, std::vector<Vec2>(g.size())};
    auto usable = [&](int i, int j) {
        return i >= 0 && j >= 0 && i < g.nx && j < g.ny && g.cls[g.index(i, j)] != NodeClass::Exterior;
    };
    // Derivative along one lattice axis; (di, dj) is the unit step.
    auto partial = [&](int i, int j, int di, int dj) {
        const double c = u[g.index(i, j)];
        const bool fwd = usable(i + di, j + dj), back = usable(i - di, j - dj);
        if (fwd && back) return (u[g.index(i + di, j + dj)] - u[g.index(i - di, j - dj)]) / (2.0 * g.h);
        if (back) {
            const double b1 = u[g.index(i - di, j - dj)];
            if (usable(i - 2 * di, j - 2 * dj))
                return (3.0 * c - 4.0 * b1 + u[g.index(i - 2 * di, j - 2 * dj)]) / (2.0 * g.h);
            return (c - b1) / g.h;
        }
        if (fwd) {
            const double f1 = u[g.index(i + di, j + dj)];
            if (usable(i + 2 * di, j + 2 * dj))
                return (-3.0 * c + 4.0 * f1 - u[g.index(i + 2 * di, j + 2 * dj)]) / (2.0 * g.h);
            return (f1 - c) / g.h;
        }
        return 0.0;
    };
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int k = g.index(i, j);
            if (!g.is_interior(k)) continue;
            out.values[k] = {partial(i, j, 1, 0), partial(i, j, 0, 1)};
        }
    return out;
}

double sample(const ScalarField& field, Vec2 x)
{
    const Grid& g = *field.grid;
    return interpolate(g, field.values, x, [&](int k) { return g.cls[k] != NodeClass::Exterior; });
}

Vec2 sample_gradient(const VectorField& vf, Vec2 x)
{
    const Grid& g = *vf.grid;
    return interpolate(g, vf.values, x, [&](int k) { return g.is_interior(k); });
}

LevelCurve level_curve(const ScalarField& field, double c)
{
    if (!(c > 0.0 && c < 1.0)) throw ValidationError("level must lie in (0, 1)");
    const Grid& g = *field.grid;
    const auto& u = field.values;
    const int n = static_cast<int>(g.size());

    // Edge ids: 2k is the edge from node k to its +x neighbour, 2k+1 to its +y neighbour.
    auto crossing = [&](int edge) {
        const int k = edge / 2;
        const int m = (edge % 2 == 0) ? k + 1 : k + g.nx;
        const double t = (c - u[k]) / (u[m] - u[k]);
        const Vec2 a = g.node(k), b = g.node(m);
        return a + (b - a) * t;
    };

    std::vector<int> next(2 * static_cast<size_t>(n), -1);
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            const int k00 = g.index(i, j), k10 = k00 + 1, k01 = k00 + g.nx, k11 = k01 + 1;
            if (g.cls[k00] == NodeClass::Exterior || g.cls[k10] == NodeClass::Exterior ||
                g.cls[k01] == NodeClass::Exterior || g.cls[k11] == NodeClass::Exterior)
                continue;
            // Cell edges in counterclockwise order with their traversal endpoints.
            const int corner[4] = {k00, k10, k11, k01};
            const int edge[4] = {2 * k00, 2 * k10 + 1, 2 * k01, 2 * k00 + 1};
            int kind[4];  // +1: inside -> outside (segment start), -1: outside -> inside (end), 0: none
            int ncross = 0;
            for (int e = 0; e < 4; ++e) {
                const bool a_in = u[corner[e]] > c, b_in = u[corner[(e + 1) % 4]] > c;
                kind[e] = a_in == b_in ? 0 : (a_in ? 1 : -1);
                ncross += kind[e] != 0;
            }
            if (ncross == 0) continue;
            const bool center_in = 0.25 * (u[k00] + u[k10] + u[k01] + u[k11]) > c;
            for (int e = 0; e < 4; ++e) {
                if (kind[e] != 1) continue;
                // Saddles: keep the inside region connected through the centre
                // when the centre is inside, split it otherwise.
                int f = e;
                for (int step = 1; step < 4; ++step) {
                    const int cand = center_in ? (e + step) % 4 : (e + 4 - step) % 4;
                    if (kind[cand] == -1) { f = cand; break; }
                }
                next[edge[e]] = edge[f];
            }
        }
    }

    LevelCurve out{c, {}};
    std::vector<char> used(next.size(), 0);
    for (size_t start = 0; start < next.size(); ++start) {
        if (next[start] < 0 || used[start]) continue;
        Polyline loop;
        int e = static_cast<int>(start);
        bool closed = false;
        while (e >= 0 && !used[e]) {
            used[e] = 1;
            const Vec2 p = crossing(e);
            if (loop.vertices.empty() || !(loop.vertices.back() == p)) loop.vertices.push_back(p);
            e = next[e];
            if (e == static_cast<int>(start)) { closed = true; break; }
        }
        if (!closed) continue;
        if (loop.vertices.size() > 1 && loop.vertices.front() == loop.vertices.back())
            loop.vertices.pop_back();
        if (loop.vertices.size() < 3) continue;
        double area2 = 0.0;
        const auto& v = loop.vertices;
        for (size_t q = 0; q < v.size(); ++q) area2 += cross(v[q], v[(q + 1) % v.size()]);
        if (area2 < 0.0) std::reverse(loop.vertices.begin(), loop.vertices.end());
        out.loops.push_back(std::move(loop));
    }
    if (out.loops.empty()) throw EmptyLevel("no crossing of the requested level");
    return out;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts)
{
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Vec2> hull(2 * pts.size());
    size_t k = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    for (size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

double convexity_defect(const Polyline& loop)
{
    const std::vector<Vec2> hull = convex_hull(loop.vertices);
    if (hull.size() < 3) return 0.0;
    double worst = 0.0;
    for (const Vec2& p : loop.vertices) {
        double d = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < hull.size(); ++i)
            d = std::min(d, segment_distance(p, hull[i], hull[(i + 1) % hull.size()]));
        worst = std::max(worst, d);
    }
    return worst;
}

double convexity_defect(const LevelCurve& curve)
{
    double worst = 0.0;
    for (const Polyline& loop : curve.loops) worst = std::max(worst, convexity_defect(loop));
    return worst;
}

double polyline_length(const Polyline& loop)
{
    double len = 0.0;
    const auto& v = loop.vertices;
    for (size_t i = 0; i < v.size(); ++i) len += distance(v[i], v[(i + 1) % v.size()]);
    return len;
}

}  // namespace ringflow
