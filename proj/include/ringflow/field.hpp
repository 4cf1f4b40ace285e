#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ringflow/geometry.hpp"

namespace ringflow {

enum class NodeClass : std::uint8_t { Interior = 0, OuterBc = 1, InnerBc = 2, Exterior = 3 };

// Uniform node lattice over the padded bounding box of the outer body. Node
// (i, j) sits at origin + h * (i, j); nodes are stored row-major (j outer).
struct Grid {
    ConvexRing ring;
    Vec2 origin;
    double h = 0.0;
    int nx = 0;
    int ny = 0;
    double r_gamma = 0.0;  // capture radius actually used (>= h)
    double sep = 0.0;      // dist(inner, boundary of outer)
    std::vector<NodeClass> cls;

    int index(int i, int j) const { return j * nx + i; }
    int col(int k) const { return k % nx; }
    int row(int k) const { return k / nx; }
    Vec2 node(int i, int j) const { return {origin.x + h * i, origin.y + h * j}; }
    Vec2 node(int k) const { return node(col(k), row(k)); }
    size_t size() const { return cls.size(); }
    bool is_interior(int k) const { return cls[k] == NodeClass::Interior; }

    // Obstacle the inner boundary presents to the lattice (capture disk or capsule
    // for a point or segment).
    ConvexBody inner_obstacle() const { return capture_body(ring.inner, r_gamma); }

    // Distance to the inner boundary set itself, and to the outer boundary.
    double gamma_distance(Vec2 x) const { return distance_to(ring.inner, x); }
    double outer_distance(Vec2 x) const { return boundary_distance(ring.outer, x); }
};

using GridPtr = std::shared_ptr<const Grid>;

// Throws TooCoarse when the interior node set is empty or not edge-connected,
// ValidationError when h is not below separation / 8.
GridPtr build_grid(const ConvexRing& ring, double h, double r_gamma = 0.0);

// Rebuilds a grid from stored lattice parameters (used by field snapshots).
GridPtr make_grid(const ConvexRing& ring, Vec2 origin, double h, int nx, int ny,
                  double r_gamma, std::vector<NodeClass> cls);

struct ScalarField {
    GridPtr grid;
    std::vector<double> values;

    double operator[](int k) const { return values[static_cast<size_t>(k)]; }
};

struct VectorField {
    GridPtr grid;
    std::vector<Vec2> values;  // zero at non-interior nodes
};

struct Polyline {
    std::vector<Vec2> vertices;  // closed: last vertex connects back to the first
};

struct LevelCurve {
    double level = 0.0;
    std::vector<Polyline> loops;
};

// Field with every node set from f (boundary classes included).
ScalarField sample_function(GridPtr grid, const auto& f)
{
    ScalarField out{grid, std::vector<double>(grid->size())};
    for (size_t k = 0; k < grid->size(); ++k) out.values[k] = f(grid->node(static_cast<int>(k)));
    return out;
}

VectorField gradient(const ScalarField& field);

// Bilinear interpolation. Cells with an unusable corner fall back to the
// bilinear patch of the nearest fully usable cell, evaluated at x.
// Throws OutOfDomain outside the lattice hull.
double sample(const ScalarField& field, Vec2 x);
Vec2 sample_gradient(const VectorField& vf, Vec2 x);

LevelCurve level_curve(const ScalarField& field, double c);
double convexity_defect(const LevelCurve& curve);
double convexity_defect(const Polyline& loop);

// Convex hull, counterclockwise, no repeated closing vertex.
std::vector<Vec2> convex_hull(std::vector<Vec2> pts);

double polyline_length(const Polyline& loop);

}  // namespace ringflow
