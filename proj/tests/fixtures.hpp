#pragma once

#include <map>
#include <string>
#include <utility>

#include "ringflow/solver.hpp"

namespace fixtures {

using namespace ringflow;

inline ConvexRing square() { return make_ring(ConvexBody::rectangle(-1, -1, 1, 1), ConvexBody::point({0, 0})); }
inline ConvexRing disk() { return make_ring(ConvexBody::disk({0, 0}, 1.0), ConvexBody::point({0, 0})); }
inline ConvexRing annulus() { return make_ring(ConvexBody::disk({0, 0}, 1.0), ConvexBody::disk({0, 0}, 0.4)); }
inline ConvexRing ellipse() { return make_ring(ConvexBody::ellipse({0, 0}, 1.5, 1.0), ConvexBody::point({0, 0})); }
inline ConvexRing hexagon()
{
    return make_ring(ConvexBody::regular_polygon({0, 0}, 1.0, 6), ConvexBody::point({0, 0}));
}

struct Solved {
    ScalarField V;
    VectorField grad;
};

// Solves each (fixture, h) once per test binary.
inline const Solved& solved(const std::string& name, double h)
{
    static std::map<std::pair<std::string, double>, Solved> cache;
    auto it = cache.find({name, h});
    if (it != cache.end()) return it->second;
    ConvexRing ring = name == "square"    ? square()
                      : name == "disk"    ? disk()
                      : name == "annulus" ? annulus()
                      : name == "ellipse" ? ellipse()
                                          : hexagon();
    ScalarField V = solve_infinity(build_grid(ring, h), SolveParams{});
    VectorField g = gradient(V);
    return cache.emplace(std::make_pair(name, h), Solved{std::move(V), std::move(g)}).first->second;
}

}  // namespace fixtures
