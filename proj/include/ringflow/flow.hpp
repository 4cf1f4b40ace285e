#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ringflow/field.hpp"

namespace ringflow {

enum class Termination { ReachedGamma, ReachedOuter, Stalled, LeftDomain };

std::string to_string(Termination t);

struct TraceParams {
    double max_step = 0.0;      // 0 selects h/2; never more than h/2
    double delta_stop = 1e-3;   // ascending traces stop at V >= 1 - delta_stop
    double eps_speed = 0.0;     // 0 selects 1e-6 / separation
    int stall_budget = 50;      // consecutive slow vertices before STALLED
    double max_turn = 0.25;     // radians of direction change allowed per step
    double corner_nudge = 2.0;  // inward nudge for boundary seeds, in cells
};

struct Streamline {
    int id = 0;
    Vec2 seed;
    std::vector<Vec2> vertices;
    std::vector<double> s;      // arclength from the seed
    std::vector<double> V;
    std::vector<double> speed;  // |grad V|
    Termination termination = Termination::Stalled;

    double length() const { return s.empty() ? 0.0 : s.back(); }
};

// Classical RK4 in arclength along grad V / |grad V|. Seeds on the outer
// boundary are first moved corner_nudge cells inward (along the bisector at a
// corner). Throws SeedOutOfDomain for seeds outside the closed ring.
Streamline trace_ascending(const ScalarField& field, const VectorField& vf, Vec2 seed,
                           const TraceParams& params = {});

// Same integrator along -grad V, stopping on the outer boundary. Where the flow
// bifurcates this returns whichever branch the integrator follows.
Streamline trace_descending(const ScalarField& field, const VectorField& vf, Vec2 seed,
                            const TraceParams& params = {});

// Traces every seed (concurrently when OpenMP is available); ids are the seed indices.
std::vector<Streamline> trace_all(const ScalarField& field, const VectorField& vf,
                                  const std::vector<Vec2>& seeds, const TraceParams& params = {});

struct ClPoint {
    Vec2 location;
    double level = 0.0;
    int first = 0;  // streamline ids
    int second = 0;
    double s_first = 0.0;
    double s_second = 0.0;
};

// Position on an ascending streamline where V first reaches c (linear in V
// between vertices); nullopt outside the streamline's level range.
std::optional<Vec2> point_at_level(const Streamline& line, double c);
std::optional<double> arclength_at_level(const Streamline& line, double c);

// Lowest level from which the two traces stay within tol_merge of each other
// up to their common top level. Levels are those of the vertices of both.
std::optional<ClPoint> detect_merge(const Streamline& a, const Streamline& b, double tol_merge,
                                    double delta_stop = 1e-3);

struct MergeEdge {
    int child = 0;
    int parent = 0;
    ClPoint point;
};

struct MergeTree {
    std::vector<int> nodes;           // streamline ids
    std::vector<MergeEdge> edges;     // at most one per child, sorted by child
    std::vector<int> roots;           // nodes without an outgoing edge
    // Every pair with a detected merge, in (first, second) order.
    std::vector<ClPoint> merges;

    std::optional<int> parent(int id) const;
};

// Each streamline keeps its earliest merge; cycles are broken at their smallest id.
MergeTree merge_tree(const std::vector<Streamline>& lines, double tol_merge,
                     double delta_stop = 1e-3);

// True iff the polylines cross transversally away from their merge and away
// from their end points (both within tol_merge).
bool crossing_check(const Streamline& a, const Streamline& b, double tol_merge);

// Sup distance, matched by arclength, between ascending traces with step caps
// h/2 and h/4.
double refinement_consistency(const ScalarField& field, const VectorField& vf, Vec2 seed,
                              const TraceParams& params = {});

// Default merge tolerance for a grid.
double default_merge_tolerance(const Grid& grid);

// n seeds per polygon edge at fractions (k + offset) / n along the edge; smooth
// bodies get 4n seeds evenly spread by arclength.
std::vector<Vec2> boundary_seeds(const ConvexBody& outer, int n, double offset = 0.5);

}  // namespace ringflow
