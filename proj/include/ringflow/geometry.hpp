#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ringflow/vec2.hpp"

namespace ringflow {

// Shapes. Point and Segment have empty interior and only appear as inner bodies.
struct PointShape {
    Vec2 center;
};

struct SegmentShape {
    Vec2 a;
    Vec2 b;
};

struct DiskShape {
    Vec2 center;
    double radius = 1.0;
};

struct EllipseShape {
    Vec2 center;
    double a = 1.0;  // semi-major
    double b = 1.0;  // semi-minor
    double rotation = 0.0;
};

// Counterclockwise, strictly convex.
struct PolygonShape {
    std::vector<Vec2> vertices;
};

// Points within `radius` of the segment [a, b]: the distance stadium of a segment.
struct CapsuleShape {
    Vec2 a;
    Vec2 b;
    double radius = 1.0;
};

using Shape = std::variant<PointShape, SegmentShape, DiskShape, EllipseShape, PolygonShape,
                           CapsuleShape>;

class ConvexBody {
public:
    static ConvexBody point(Vec2 c);
    static ConvexBody segment(Vec2 a, Vec2 b);
    static ConvexBody disk(Vec2 c, double r);
    static ConvexBody ellipse(Vec2 c, double a, double b, double rotation = 0.0);
    static ConvexBody polygon(std::vector<Vec2> vertices);
    static ConvexBody capsule(Vec2 a, Vec2 b, double r);
    static ConvexBody rectangle(double x0, double y0, double x1, double y1);
    static ConvexBody regular_polygon(Vec2 c, double circumradius, int n, double phase = 0.0);

    const Shape& shape() const { return shape_; }
    bool has_interior() const;
    std::string type_name() const;

    template <class T>
    const T* as() const { return std::get_if<T>(&shape_); }

private:
    explicit ConvexBody(Shape s) : shape_(std::move(s)) {}
    Shape shape_;
};

struct ConvexRing {
    ConvexBody outer;
    ConvexBody inner;
};

// Validates the clearance invariant and returns the ring.
ConvexRing make_ring(ConvexBody outer, ConvexBody inner);

struct HighRidge {
    bool is_segment = false;
    Vec2 a;  // the point, or the first endpoint
    Vec2 b;  // equals a for a point ridge
    double clearance = 0.0;
};

struct BoundingBox {
    Vec2 lo;
    Vec2 hi;
};

struct CornerAngle {
    Vec2 vertex;
    double angle = 0.0;
};

bool contains(const ConvexBody& body, Vec2 x);

// Unsigned distance from x to the boundary of the body. For a point or
// segment the boundary is the set itself.
double boundary_distance(const ConvexBody& body, Vec2 x);

// Negative inside, positive outside; magnitude is boundary_distance.
double signed_distance(const ConvexBody& body, Vec2 x);

// Distance from x to the closed body (zero inside).
double distance_to(const ConvexBody& body, Vec2 x);

double separation(const ConvexRing& ring);
double diameter(const ConvexBody& body);
BoundingBox bounding_box(const ConvexBody& body);
HighRidge high_ridge(const ConvexBody& body, double tol = 1e-9);
bool is_stadium(const ConvexRing& ring, double tol = 1e-6);
std::vector<CornerAngle> corner_angles(const ConvexBody& body);
ConvexBody inscribed_disk(const ConvexRing& ring);

// Parameter interval {t : x + t d in body} of the line through x with
// direction d; nullopt when the line misses the body. d need not be unit.
std::optional<std::pair<double, double>> line_interval(const ConvexBody& body, Vec2 x, Vec2 d);

// Inner body thickened by r: a disk for a point, a capsule for a segment, the
// body itself otherwise. This is the obstacle the grid and the solver see.
ConvexBody capture_body(const ConvexBody& inner, double r);

// n points spread along the boundary by arclength (vertices included for polygons).
std::vector<Vec2> boundary_samples(const ConvexBody& body, int n);

// Closest boundary point and inward unit normal there. At a polygon vertex the
// inward direction is the angle bisector.
Vec2 closest_boundary_point(const ConvexBody& body, Vec2 x);
Vec2 inward_direction(const ConvexBody& body, Vec2 boundary_point);

double perimeter(const ConvexBody& body);

// Point at arclength fraction u in [0,1) along the boundary, counterclockwise.
Vec2 boundary_point_at(const ConvexBody& body, double u);

// Representative center used for angular ordering around the inner body.
Vec2 body_center(const ConvexBody& body);

}  // namespace ringflow
