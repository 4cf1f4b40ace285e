#include "ringflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ringflow/errors.hpp"

namespace ringflow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Vec2 rotate(Vec2 v, double angle)
{
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

Vec2 to_local(const EllipseShape& e, Vec2 x) { return rotate(x - e.center, -e.rotation); }
Vec2 to_world(const EllipseShape& e, Vec2 p) { return rotate(p, e.rotation) + e.center; }

// Root of F(s) = (r0 z0 / (s + r0))^2 + (z1 / (s + 1))^2 - 1 on the bracket
// [lo, hi]. F is convex and decreasing there, so a Newton step that leaves the
// bracket is replaced by bisection.
double ellipse_multiplier(double r0, double z0, double z1, double lo, double hi)
{
    auto f = [&](double s) {
        const double n0 = r0 * z0 / (s + r0), n1 = z1 / (s + 1.0);
        return n0 * n0 + n1 * n1 - 1.0;
    };
    auto df = [&](double s) {
        const double n0 = r0 * z0 / (s + r0), n1 = z1 / (s + 1.0);
        return -2.0 * (n0 * n0 / (s + r0) + n1 * n1 / (s + 1.0));
    };
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double fs = f(s);
        if (fs > 0.0) lo = s; else hi = s;
        if (fs == 0.0 || hi - lo <= 1e-15 * std::max(1.0, std::abs(s))) break;
        const double d = df(s);
        double next = d != 0.0 ? s - fs / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - s) <= 1e-14 * std::max(1.0, std::abs(s))) {
            s = next;
            break;
        }
        s = next;
    }
    return s;
}

// Closest point on the axis-aligned ellipse (x/e0)^2 + (y/e1)^2 = 1, e0 >= e1,
// for a query in the closed first quadrant.
Vec2 ellipse_closest_quadrant(double e0, double e1, double y0, double y1)
{
    if (y1 > 0.0) {
        if (y0 > 0.0) {
            const double z0 = y0 / e0, z1 = y1 / e1;
            const double g = z0 * z0 + z1 * z1 - 1.0;
            if (g == 0.0) return {y0, y1};
            const double r0 = (e0 / e1) * (e0 / e1);
            const double lo = z1 - 1.0;
            const double hi = g < 0.0 ? 0.0 : std::hypot(r0 * z0, z1) - 1.0;
            const double s = ellipse_multiplier(r0, z0, z1, lo, hi);
            return {r0 * y0 / (s + r0), y1 / (s + 1.0)};
        }
        return {0.0, e1};
    }
    const double numer = e0 * y0, denom = e0 * e0 - e1 * e1;
    if (numer < denom) {
        const double xd = numer / denom;
        return {e0 * xd, e1 * std::sqrt(std::max(0.0, 1.0 - xd * xd))};
    }
    return {e0, 0.0};
}

Vec2 ellipse_closest(const EllipseShape& e, Vec2 x)
{
    const Vec2 p = to_local(e, x);
    const Vec2 q = ellipse_closest_quadrant(e.a, e.b, std::abs(p.x), std::abs(p.y));
    return to_world(e, {std::copysign(q.x, p.x), std::copysign(q.y, p.y)});
}

bool ellipse_inside(const EllipseShape& e, Vec2 x)
{
    const Vec2 p = to_local(e, x);
    return (p.x / e.a) * (p.x / e.a) + (p.y / e.b) * (p.y / e.b) <= 1.0;
}

double polygon_boundary_distance(const PolygonShape& poly, Vec2 x)
{
    const auto& v = poly.vertices;
    double best = kInf;
    for (size_t i = 0; i < v.size(); ++i)
        best = std::min(best, segment_distance(x, v[i], v[(i + 1) % v.size()]));
    return best;
}

bool polygon_inside(const PolygonShape& poly, Vec2 x)
{
    const auto& v = poly.vertices;
    for (size_t i = 0; i < v.size(); ++i) {
        if (cross(v[(i + 1) % v.size()] - v[i], x - v[i]) < 0.0) return false;
    }
    return true;
}

PolygonShape capsule_core(const CapsuleShape& c)
{
    const Vec2 n = perp(normalized(c.b - c.a)) * c.radius;
    return {{c.a - n, c.b - n, c.b + n, c.a + n}};
}

std::optional<std::pair<double, double>> disk_interval(Vec2 c, double r, Vec2 x, Vec2 d)
{
    const Vec2 f = x - c;
    const double qa = norm2(d), qb = dot(f, d), qc = norm2(f) - r * r;
    const double disc = qb * qb - qa * qc;
    if (qa == 0.0 || disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    // Stable roots.
    const double q = qb >= 0.0 ? -(qb + sq) : -(qb - sq);
    double t0 = q / qa, t1 = q != 0.0 ? qc / q : -t0;
    if (t0 > t1) std::swap(t0, t1);
    return std::make_pair(t0, t1);
}

std::optional<std::pair<double, double>> polygon_interval(const PolygonShape& poly, Vec2 x, Vec2 d)
{
    const auto& v = poly.vertices;
    double t0 = -kInf, t1 = kInf;
    for (size_t i = 0; i < v.size(); ++i) {
        const Vec2 n = perp(v[(i + 1) % v.size()] - v[i]);  // inward for CCW
        const double num = dot(n, x - v[i]);
        const double den = dot(n, d);
        if (den == 0.0) {
            if (num < 0.0) return std::nullopt;
            continue;
        }
        const double t = -num / den;
        if (den > 0.0) t0 = std::max(t0, t); else t1 = std::min(t1, t);
        if (t0 > t1) return std::nullopt;
    }
    return std::make_pair(t0, t1);
}

std::optional<std::pair<double, double>> merge_intervals(
    std::optional<std::pair<double, double>> a, std::optional<std::pair<double, double>> b)
{
    if (!a) return b;
    if (!b) return a;
    return std::make_pair(std::min(a->first, b->first), std::max(a->second, b->second));
}

double ellipse_perimeter(const EllipseShape& e)
{
    // Ramanujan's second approximation; only used to space samples.
    const double h = ((e.a - e.b) * (e.a - e.b)) / ((e.a + e.b) * (e.a + e.b));
    return kPi * (e.a + e.b) * (1.0 + 3.0 * h / (10.0 + std::sqrt(4.0 - 3.0 * h)));
}

void require(bool ok, const std::string& what)
{
    if (!ok) throw ValidationError(what);
}

bool finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

}  // namespace

ConvexBody ConvexBody::point(Vec2 c)
{
    require(finite(c), "point: non-finite coordinates");
    return ConvexBody(PointShape{c});
}

ConvexBody ConvexBody::segment(Vec2 a, Vec2 b)
{
    require(finite(a) && finite(b), "segment: non-finite coordinates");
    require(!(a == b), "segment: endpoints must be distinct");
    return ConvexBody(SegmentShape{a, b});
}

ConvexBody ConvexBody::disk(Vec2 c, double r)
{
    require(finite(c) && std::isfinite(r), "disk: non-finite parameters");
    require(r > 0.0, "disk: radius must be positive");
    return ConvexBody(DiskShape{c, r});
}

ConvexBody ConvexBody::ellipse(Vec2 c, double a, double b, double rotation)
{
    require(finite(c) && std::isfinite(a) && std::isfinite(b) && std::isfinite(rotation),
            "ellipse: non-finite parameters");
    require(a > 0.0 && b > 0.0, "ellipse: semi-axes must be positive");
    require(a >= b, "ellipse: semi-axes must satisfy a >= b");
    return ConvexBody(EllipseShape{c, a, b, rotation});
}

ConvexBody ConvexBody::polygon(std::vector<Vec2> vertices)
{
    const size_t n = vertices.size();
    require(n >= 3, "polygon: needs at least three vertices");
    for (const Vec2& v : vertices) require(finite(v), "polygon: non-finite vertex");
    for (size_t i = 0; i < n; ++i) {
        const Vec2 e0 = vertices[(i + 1) % n] - vertices[i];
        const Vec2 e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
        require(cross(e0, e1) > 0.0,
                "polygon: vertices must form a strictly convex counterclockwise chain (vertex " +
                    std::to_string((i + 1) % n) + ")");
    }
    // A star polygon also turns left at every vertex; its total turning is a
    // multiple of 2*pi larger than a simple one.
    double turning = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const Vec2 e0 = vertices[(i + 1) % n] - vertices[i];
        const Vec2 e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
        turning += std::atan2(cross(e0, e1), dot(e0, e1));
    }
    require(std::abs(turning - 2.0 * kPi) < 1e-6, "polygon: vertex chain winds more than once");
    return ConvexBody(PolygonShape{std::move(vertices)});
}

ConvexBody ConvexBody::capsule(Vec2 a, Vec2 b, double r)
{
    require(finite(a) && finite(b) && std::isfinite(r), "capsule: non-finite parameters");
    require(r > 0.0, "capsule: radius must be positive");
    if (a == b) return disk(a, r);
    return ConvexBody(CapsuleShape{a, b, r});
}

ConvexBody ConvexBody::rectangle(double x0, double y0, double x1, double y1)
{
    return polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

ConvexBody ConvexBody::regular_polygon(Vec2 c, double circumradius, int n, double phase)
{
    std::vector<Vec2> v;
    for (int k = 0; k < n; ++k) {
        const double t = phase + 2.0 * kPi * k / n;
        v.push_back(c + Vec2{circumradius * std::cos(t), circumradius * std::sin(t)});
    }
    return polygon(std::move(v));
}

bool ConvexBody::has_interior() const
{
    return !std::holds_alternative<PointShape>(shape_) &&
           !std::holds_alternative<SegmentShape>(shape_);
}

std::string ConvexBody::type_name() const
{
    return std::visit(overloaded{
                          [](const PointShape&) { return std::string("point"); },
                          [](const SegmentShape&) { return std::string("segment"); },
                          [](const DiskShape&) { return std::string("disk"); },
                          [](const EllipseShape&) { return std::string("ellipse"); },
                          [](const PolygonShape&) { return std::string("polygon"); },
                          [](const CapsuleShape&) { return std::string("capsule"); },
                      },
                      shape_);
}

bool contains(const ConvexBody& body, Vec2 x)
{
    return std::visit(
        overloaded{
            [&](const PointShape& p) { return x == p.center; },
            [&](const SegmentShape& s) {
                const Vec2 ab = s.b - s.a, ax = x - s.a;
                return cross(ab, ax) == 0.0 && dot(ab, ax) >= 0.0 && dot(ab, ax) <= norm2(ab);
            },
            [&](const DiskShape& d) { return norm2(x - d.center) <= d.radius * d.radius; },
            [&](const EllipseShape& e) { return ellipse_inside(e, x); },
            [&](const PolygonShape& p) { return polygon_inside(p, x); },
            [&](const CapsuleShape& c) { return segment_distance(x, c.a, c.b) <= c.radius; },
        },
        body.shape());
}

double boundary_distance(const ConvexBody& body, Vec2 x)
{
    return std::abs(signed_distance(body, x));
}

double signed_distance(const ConvexBody& body, Vec2 x)
{
    return std::visit(
        overloaded{
            [&](const PointShape& p) { return distance(x, p.center); },
            [&](const SegmentShape& s) { return segment_distance(x, s.a, s.b); },
            [&](const DiskShape& d) { return distance(x, d.center) - d.radius; },
            [&](const EllipseShape& e) {
                const double dd = distance(x, ellipse_closest(e, x));
                return ellipse_inside(e, x) ? -dd : dd;
            },
            [&](const PolygonShape& p) {
                const double dd = polygon_boundary_distance(p, x);
                return polygon_inside(p, x) ? -dd : dd;
            },
            [&](const CapsuleShape& c) { return segment_distance(x, c.a, c.b) - c.radius; },
        },
        body.shape());
}

double distance_to(const ConvexBody& body, Vec2 x)
{
    return std::max(0.0, signed_distance(body, x));
}

double perimeter(const ConvexBody& body)
{
    return std::visit(
        overloaded{
            [](const PointShape&) { return 0.0; },
            [](const SegmentShape& s) { return 2.0 * distance(s.a, s.b); },
            [](const DiskShape& d) { return 2.0 * kPi * d.radius; },
            [](const EllipseShape& e) { return ellipse_perimeter(e); },
            [](const PolygonShape& p) {
                double sum = 0.0;
                for (size_t i = 0; i < p.vertices.size(); ++i)
                    sum += distance(p.vertices[i], p.vertices[(i + 1) % p.vertices.size()]);
                return sum;
            },
            [](const CapsuleShape& c) { return 2.0 * distance(c.a, c.b) + 2.0 * kPi * c.radius; },
        },
        body.shape());
}

Vec2 boundary_point_at(const ConvexBody& body, double u)
{
    u -= std::floor(u);
    return std::visit(
        overloaded{
            [&](const PointShape& p) { return p.center; },
            [&](const SegmentShape& s) {
                const double t = u < 0.5 ? 2.0 * u : 2.0 - 2.0 * u;
                return s.a + (s.b - s.a) * t;
            },
            [&](const DiskShape& d) {
                const double t = 2.0 * kPi * u;
                return d.center + Vec2{d.radius * std::cos(t), d.radius * std::sin(t)};
            },
            [&](const EllipseShape& e) {
                // Uniform in the eccentric anomaly, not in arclength.
                const double t = 2.0 * kPi * u;
                return to_world(e, {e.a * std::cos(t), e.b * std::sin(t)});
            },
            [&](const PolygonShape& p) {
                const auto& v = p.vertices;
                double target = u * perimeter(body);
                for (size_t i = 0; i < v.size(); ++i) {
                    const Vec2 a = v[i], b = v[(i + 1) % v.size()];
                    const double len = distance(a, b);
                    if (target <= len || i + 1 == v.size())
                        return a + (b - a) * std::min(1.0, target / len);
                    target -= len;
                }
                return v.front();
            },
            [&](const CapsuleShape& c) {
                const double len = distance(c.a, c.b);
                const Vec2 e = normalized(c.b - c.a), n = perp(e);
                const double arc = kPi * c.radius;
                double t = u * (2.0 * len + 2.0 * arc);
                if (t < len) return c.a - n * c.radius + e * t;
                t -= len;
                if (t < arc) {
                    const double ang = -kPi / 2.0 + t / c.radius;
                    return c.b + (e * std::cos(ang) + n * std::sin(ang)) * c.radius;
                }
                t -= arc;
                if (t < len) return c.b + n * c.radius - e * t;
                t -= len;
                const double ang = kPi / 2.0 + t / c.radius;
                return c.a + (e * std::cos(ang) + n * std::sin(ang)) * c.radius;
            },
        },
        body.shape());
}

std::vector<Vec2> boundary_samples(const ConvexBody& body, int n)
{
    std::vector<Vec2> out;
    if (const auto* p = body.as<PolygonShape>()) out = p->vertices;
    out.reserve(out.size() + static_cast<size_t>(std::max(n, 0)));
    for (int i = 0; i < n; ++i) out.push_back(boundary_point_at(body, static_cast<double>(i) / n));
    return out;
}

BoundingBox bounding_box(const ConvexBody& body)
{
    return std::visit(
        overloaded{
            [](const PointShape& p) { return BoundingBox{p.center, p.center}; },
            [](const SegmentShape& s) {
                return BoundingBox{{std::min(s.a.x, s.b.x), std::min(s.a.y, s.b.y)},
                                   {std::max(s.a.x, s.b.x), std::max(s.a.y, s.b.y)}};
            },
            [](const DiskShape& d) {
                const Vec2 r{d.radius, d.radius};
                return BoundingBox{d.center - r, d.center + r};
            },
            [](const EllipseShape& e) {
                const double c = std::cos(e.rotation), s = std::sin(e.rotation);
                const Vec2 r{std::hypot(e.a * c, e.b * s), std::hypot(e.a * s, e.b * c)};
                return BoundingBox{e.center - r, e.center + r};
            },
            [](const PolygonShape& p) {
                BoundingBox bb{p.vertices.front(), p.vertices.front()};
                for (const Vec2& v : p.vertices) {
                    bb.lo = {std::min(bb.lo.x, v.x), std::min(bb.lo.y, v.y)};
                    bb.hi = {std::max(bb.hi.x, v.x), std::max(bb.hi.y, v.y)};
                }
                return bb;
            },
            [](const CapsuleShape& c) {
                const Vec2 r{c.radius, c.radius};
                return BoundingBox{Vec2{std::min(c.a.x, c.b.x), std::min(c.a.y, c.b.y)} - r,
                                   Vec2{std::max(c.a.x, c.b.x), std::max(c.a.y, c.b.y)} + r};
            },
        },
        body.shape());
}

double separation(const ConvexRing& ring)
{
    const ConvexBody& outer = ring.outer;
    // dist(., boundary of outer) is concave on the outer body, so its minimum
    // over the inner body sits on the inner body's extreme points.
    const double sep = std::visit(
        overloaded{
            [&](const PointShape& p) { return boundary_distance(outer, p.center); },
            [&](const SegmentShape& s) {
                return std::min(boundary_distance(outer, s.a), boundary_distance(outer, s.b));
            },
            [&](const DiskShape& d) { return boundary_distance(outer, d.center) - d.radius; },
            [&](const CapsuleShape& c) {
                return std::min(boundary_distance(outer, c.a), boundary_distance(outer, c.b)) -
                       c.radius;
            },
            [&](const PolygonShape& p) {
                double best = kInf;
                for (const Vec2& v : p.vertices) best = std::min(best, boundary_distance(outer, v));
                return best;
            },
            [&](const EllipseShape&) {
                const int n = 4096;
                auto f = [&](double u) {
                    return boundary_distance(outer, boundary_point_at(ring.inner, u));
                };
                int best_i = 0;
                double best = kInf;
                for (int i = 0; i < n; ++i) {
                    const double v = f(static_cast<double>(i) / n);
                    if (v < best) { best = v; best_i = i; }
                }
                // Golden-section refinement around the best sample.
                double lo = (best_i - 1.0) / n, hi = (best_i + 1.0) / n;
                const double g = (std::sqrt(5.0) - 1.0) / 2.0;
                double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
                double fc = f(c), fd = f(d);
                for (int it = 0; it < 80; ++it) {
                    if (fc < fd) { hi = d; d = c; fd = fc; c = hi - g * (hi - lo); fc = f(c); }
                    else { lo = c; c = d; fc = fd; d = lo + g * (hi - lo); fd = f(d); }
                }
                return std::min(best, std::min(fc, fd));
            },
        },
        ring.inner.shape());
    if (!(sep > 1e-12)) throw ZeroSeparation("inner body touches the outer boundary");
    return sep;
}

ConvexRing make_ring(ConvexBody outer, ConvexBody inner)
{
    if (!outer.has_interior()) throw ValidationError("outer body must have nonempty interior");
    for (const Vec2& p : boundary_samples(inner, 256)) {
        if (!(signed_distance(outer, p) < 0.0))
            throw ValidationError("inner body must lie in the interior of the outer body");
    }
    ConvexRing ring{std::move(outer), std::move(inner)};
    separation(ring);
    return ring;
}

double diameter(const ConvexBody& body)
{
    return std::visit(
        overloaded{
            [](const PointShape&) { return 0.0; },
            [](const SegmentShape& s) { return distance(s.a, s.b); },
            [](const DiskShape& d) { return 2.0 * d.radius; },
            [](const EllipseShape& e) { return 2.0 * e.a; },
            [](const CapsuleShape& c) { return distance(c.a, c.b) + 2.0 * c.radius; },
            [](const PolygonShape& p) {
                // Rotating calipers over antipodal vertex pairs.
                const auto& v = p.vertices;
                const size_t n = v.size();
                auto area2 = [&](size_t i, size_t j, size_t k) {
                    return std::abs(cross(v[j] - v[i], v[k] - v[i]));
                };
                size_t j = 1;
                double best = 0.0;
                for (size_t i = 0; i < n; ++i) {
                    const size_t ni = (i + 1) % n;
                    while (area2(i, ni, (j + 1) % n) > area2(i, ni, j)) j = (j + 1) % n;
                    best = std::max({best, distance(v[i], v[j]), distance(v[ni], v[j])});
                }
                return best;
            },
        },
        body.shape());
}

HighRidge high_ridge(const ConvexBody& body, double tol)
{
    if (!body.has_interior()) throw ValidationError("high ridge needs a body with interior");
    return std::visit(
        overloaded{
            [](const PointShape&) { return HighRidge{}; },
            [](const SegmentShape&) { return HighRidge{}; },
            [](const DiskShape& d) { return HighRidge{false, d.center, d.center, d.radius}; },
            [](const EllipseShape& e) { return HighRidge{false, e.center, e.center, e.b}; },
            [](const CapsuleShape& c) { return HighRidge{true, c.a, c.b, c.radius}; },
            [&](const PolygonShape& p) {
                // Maximize r subject to n_i . (x - v_i) >= r for every edge: a
                // three-variable LP whose optimal face is a point or a segment.
                // Every vertex of that face is a triple of active constraints.
                const auto& v = p.vertices;
                const size_t n = v.size();
                std::vector<Vec2> normal(n);
                std::vector<double> offset(n);
                for (size_t i = 0; i < n; ++i) {
                    normal[i] = normalized(perp(v[(i + 1) % n] - v[i]));
                    offset[i] = dot(normal[i], v[i]);
                }
                struct Candidate { Vec2 x; double r; };
                std::vector<Candidate> cands;
                double best_r = -kInf;
                for (size_t i = 0; i < n; ++i)
                    for (size_t j = i + 1; j < n; ++j)
                        for (size_t k = j + 1; k < n; ++k) {
                            // Rows: [n.x n.y -1] [x y r]^T = offset
                            const size_t idx[3] = {i, j, k};
                            double m[3][4];
                            for (int r = 0; r < 3; ++r) {
                                m[r][0] = normal[idx[r]].x;
                                m[r][1] = normal[idx[r]].y;
                                m[r][2] = -1.0;
                                m[r][3] = offset[idx[r]];
                            }
                            const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                                               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                                               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
                            if (std::abs(det) < 1e-12) continue;
                            auto solve_col = [&](int col) {
                                double a[3][3];
                                for (int r = 0; r < 3; ++r)
                                    for (int c = 0; c < 3; ++c) a[r][c] = c == col ? m[r][3] : m[r][c];
                                return (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                                        a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                                        a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])) /
                                       det;
                            };
                            const Vec2 x{solve_col(0), solve_col(1)};
                            const double r = solve_col(2);
                            bool feasible = true;
                            for (size_t q = 0; q < n && feasible; ++q)
                                feasible = dot(normal[q], x) - offset[q] >= r - 1e-12;
                            if (!feasible) continue;
                            cands.push_back({x, r});
                            best_r = std::max(best_r, r);
                        }
                std::vector<Vec2> optimal;
                for (const auto& c : cands)
                    if (c.r >= best_r - tol) optimal.push_back(c.x);
                Vec2 ea = optimal.front(), eb = optimal.front();
                double span = 0.0;
                for (size_t i = 0; i < optimal.size(); ++i)
                    for (size_t j = i + 1; j < optimal.size(); ++j)
                        if (distance(optimal[i], optimal[j]) > span) {
                            span = distance(optimal[i], optimal[j]);
                            ea = optimal[i];
                            eb = optimal[j];
                        }
                if (span <= tol) {
                    Vec2 mean{};
                    for (const Vec2& o : optimal) mean += o;
                    mean = mean / static_cast<double>(optimal.size());
                    return HighRidge{false, mean, mean, best_r};
                }
                if (ea.x > eb.x || (ea.x == eb.x && ea.y > eb.y)) std::swap(ea, eb);
                return HighRidge{true, ea, eb, best_r};
            },
        },
        body.shape());
}

bool is_stadium(const ConvexRing& ring, double tol)
{
    const HighRidge ridge = high_ridge(ring.outer, std::min(tol, 1e-9));
    ConvexBody ridge_set = ConvexBody::point(ridge.a);
    if (const auto* p = ring.inner.as<PointShape>()) {
        if (ridge.is_segment || distance(p->center, ridge.a) > tol) return false;
    } else if (const auto* s = ring.inner.as<SegmentShape>()) {
        if (!ridge.is_segment) return false;
        const bool same = distance(s->a, ridge.a) <= tol && distance(s->b, ridge.b) <= tol;
        const bool flipped = distance(s->a, ridge.b) <= tol && distance(s->b, ridge.a) <= tol;
        if (!same && !flipped) return false;
        ridge_set = ConvexBody::segment(ridge.a, ridge.b);
    } else {
        return false;
    }
    // Hausdorff comparison of the outer boundary with the boundary of the
    // clearance neighbourhood of the ridge, both ways.
    for (const Vec2& xi : boundary_samples(ring.outer, 1440)) {
        if (std::abs(distance_to(ridge_set, xi) - ridge.clearance) > tol) return false;
    }
    const ConvexBody neighbourhood = capture_body(ridge_set, ridge.clearance);
    for (const Vec2& z : boundary_samples(neighbourhood, 1440)) {
        if (boundary_distance(ring.outer, z) > tol) return false;
    }
    return true;
}

std::vector<CornerAngle> corner_angles(const ConvexBody& body)
{
    std::vector<CornerAngle> out;
    const auto* p = body.as<PolygonShape>();
    if (!p) return out;
    const auto& v = p->vertices;
    const size_t n = v.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2 e0 = v[i] - v[(i + n - 1) % n];
        const Vec2 e1 = v[(i + 1) % n] - v[i];
        const double turn = std::atan2(cross(e0, e1), dot(e0, e1));
        out.push_back({v[i], kPi - turn});
    }
    return out;
}

ConvexBody inscribed_disk(const ConvexRing& ring)
{
    const auto* p = ring.inner.as<PointShape>();
    if (!p) throw NotAPoint("inscribed disk needs a point inner boundary");
    return ConvexBody::disk(p->center, separation(ring));
}

std::optional<std::pair<double, double>> line_interval(const ConvexBody& body, Vec2 x, Vec2 d)
{
    return std::visit(
        overloaded{
            [&](const PointShape& p) -> std::optional<std::pair<double, double>> {
                if (cross(d, p.center - x) != 0.0 || norm2(d) == 0.0) return std::nullopt;
                const double t = dot(p.center - x, d) / norm2(d);
                return std::make_pair(t, t);
            },
            [&](const SegmentShape& s) -> std::optional<std::pair<double, double>> {
                const Vec2 e = s.b - s.a;
                const double den = cross(d, e);
                if (den == 0.0) {
                    if (cross(s.a - x, d) != 0.0 || norm2(d) == 0.0) return std::nullopt;
                    double t0 = dot(s.a - x, d) / norm2(d), t1 = dot(s.b - x, d) / norm2(d);
                    if (t0 > t1) std::swap(t0, t1);
                    return std::make_pair(t0, t1);
                }
                const double t = cross(s.a - x, e) / den;
                const double u = cross(s.a - x, d) / den;
                if (u < 0.0 || u > 1.0) return std::nullopt;
                return std::make_pair(t, t);
            },
            [&](const DiskShape& c) { return disk_interval(c.center, c.radius, x, d); },
            [&](const EllipseShape& e) -> std::optional<std::pair<double, double>> {
                Vec2 px = to_local(e, x), pd = rotate(d, -e.rotation);
                px = {px.x / e.a, px.y / e.b};
                pd = {pd.x / e.a, pd.y / e.b};
                return disk_interval({0.0, 0.0}, 1.0, px, pd);
            },
            [&](const PolygonShape& p) { return polygon_interval(p, x, d); },
            [&](const CapsuleShape& c) {
                auto iv = merge_intervals(disk_interval(c.a, c.radius, x, d),
                                          disk_interval(c.b, c.radius, x, d));
                return merge_intervals(iv, polygon_interval(capsule_core(c), x, d));
            },
        },
        body.shape());
}

ConvexBody capture_body(const ConvexBody& inner, double r)
{
    if (const auto* p = inner.as<PointShape>()) return ConvexBody::disk(p->center, r);
    if (const auto* s = inner.as<SegmentShape>()) return ConvexBody::capsule(s->a, s->b, r);
    return inner;
}

Vec2 closest_boundary_point(const ConvexBody& body, Vec2 x)
{
    return std::visit(
        overloaded{
            [&](const PointShape& p) { return p.center; },
            [&](const SegmentShape& s) {
                const Vec2 ab = s.b - s.a;
                const double t = std::clamp(dot(x - s.a, ab) / norm2(ab), 0.0, 1.0);
                return s.a + ab * t;
            },
            [&](const DiskShape& d) {
                const Vec2 u = x == d.center ? Vec2{1.0, 0.0} : normalized(x - d.center);
                return d.center + u * d.radius;
            },
            [&](const EllipseShape& e) { return ellipse_closest(e, x); },
            [&](const PolygonShape& p) {
                const auto& v = p.vertices;
                Vec2 best = v.front();
                double bd = kInf;
                for (size_t i = 0; i < v.size(); ++i) {
                    const Vec2 a = v[i], ab = v[(i + 1) % v.size()] - a;
                    const double t = std::clamp(dot(x - a, ab) / norm2(ab), 0.0, 1.0);
                    const Vec2 q = a + ab * t;
                    if (distance(x, q) < bd) { bd = distance(x, q); best = q; }
                }
                return best;
            },
            [&](const CapsuleShape& c) {
                const Vec2 ab = c.b - c.a;
                const double t = std::clamp(dot(x - c.a, ab) / norm2(ab), 0.0, 1.0);
                const Vec2 q = c.a + ab * t;
                const Vec2 u = x == q ? perp(normalized(ab)) : normalized(x - q);
                return q + u * c.radius;
            },
        },
        body.shape());
}

Vec2 inward_direction(const ConvexBody& body, Vec2 xi)
{
    return std::visit(
        overloaded{
            [&](const PointShape&) { return Vec2{}; },
            [&](const SegmentShape&) { return Vec2{}; },
            [&](const DiskShape& d) { return normalized(d.center - xi); },
            [&](const EllipseShape& e) {
                const Vec2 p = to_local(e, xi);
                return normalized(rotate({-p.x / (e.a * e.a), -p.y / (e.b * e.b)}, e.rotation));
            },
            [&](const PolygonShape& p) {
                const auto& v = p.vertices;
                const size_t n = v.size();
                const double scale = diameter(body);
                for (size_t i = 0; i < n; ++i) {
                    if (distance(v[i], xi) <= 1e-9 * scale) {
                        return normalized(normalized(v[(i + n - 1) % n] - v[i]) +
                                          normalized(v[(i + 1) % n] - v[i]));
                    }
                }
                size_t best = 0;
                double bd = kInf;
                for (size_t i = 0; i < n; ++i) {
                    const double dd = segment_distance(xi, v[i], v[(i + 1) % n]);
                    if (dd < bd) { bd = dd; best = i; }
                }
                return normalized(perp(v[(best + 1) % n] - v[best]));
            },
            [&](const CapsuleShape& c) {
                const Vec2 ab = c.b - c.a;
                const double t = std::clamp(dot(xi - c.a, ab) / norm2(ab), 0.0, 1.0);
                return normalized(c.a + ab * t - xi);
            },
        },
        body.shape());
}

Vec2 body_center(const ConvexBody& body)
{
    return std::visit(
        overloaded{
            [](const PointShape& p) { return p.center; },
            [](const SegmentShape& s) { return (s.a + s.b) * 0.5; },
            [](const DiskShape& d) { return d.center; },
            [](const EllipseShape& e) { return e.center; },
            [](const PolygonShape& p) {
                Vec2 sum{};
                for (const Vec2& v : p.vertices) sum += v;
                return sum / static_cast<double>(p.vertices.size());
            },
            [](const CapsuleShape& c) { return (c.a + c.b) * 0.5; },
        },
        body.shape());
}

}  // namespace ringflow
