#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "ringflow/errors.hpp"
#include "ringflow/solver.hpp"

using namespace ringflow;
using doctest::Approx;

namespace {

const double h32 = 1.0 / 32.0;
const double h64 = 1.0 / 64.0;

template <class F>
double max_error(const ScalarField& u, F exact, double min_gamma_distance = 0.0)
{
    const Grid& g = *u.grid;
    double worst = 0.0;
    for (int k = 0; k < static_cast<int>(g.size()); ++k) {
        if (!g.is_interior(k)) continue;
        const Vec2 x = g.node(k);
        if (g.gamma_distance(x) <= min_gamma_distance) continue;
        worst = std::max(worst, std::abs(u.values[k] - exact(x)));
    }
    return worst;
}

}  // namespace

TEST_CASE("solve_infinity: unit disk is the cone away from the apex")
{
    const double h = 1.0 / 128.0;
    const auto& s = fixtures::solved("disk", h);
    CHECK(max_error(s.V, [](Vec2 x) { return 1.0 - norm(x); }, 4.0 * h) <= 0.02);
}

TEST_CASE("solve_infinity: annulus is the radial cone")
{
    const auto& s = fixtures::solved("annulus", h64);
    CHECK(max_error(s.V, [](Vec2 x) { return (1.0 - norm(x)) / 0.6; }) <= 0.02);
}

TEST_CASE("solve_infinity: square potential is linear on the medians")
{
    const auto& s = fixtures::solved("square", h64);
    const Grid& g = *s.V.grid;
    double worst = 0.0;
    for (int k = 0; k < static_cast<int>(g.size()); ++k) {
        if (!g.is_interior(k)) continue;
        const Vec2 x = g.node(k);
        if (std::abs(x.x) < 1e-12) worst = std::max(worst, std::abs(s.V.values[k] - (1.0 - std::abs(x.y))));
    }
    CHECK(worst <= 0.02);
}

TEST_CASE("solve_infinity: out of sweeps")
{
    SolveParams p;
    p.max_sweeps = 3;
    CHECK_THROWS_AS(solve_infinity(build_grid(fixtures::square(), h32), p), NoConvergence);
}

TEST_CASE("solve_p: p = 2 matches the logarithmic annulus solution")
{
    const GridPtr g = build_grid(fixtures::disk(), h64);
    SolveParams params;
    params.relaxation = 1.8;
    const ScalarField u = solve_p(g, 2.0, params);
    const double r_gamma = g->r_gamma;
    double worst = 0.0;
    for (int k = 0; k < static_cast<int>(g->size()); ++k) {
        const double r = norm(g->node(k));
        if (g->is_interior(k) && r >= 0.1)
            worst = std::max(worst, std::abs(u.values[k] - std::log(r) / std::log(r_gamma)));
    }
    CHECK(worst <= 0.03);
}

TEST_CASE("solve_p: p = 64 on the annulus is close to the infinity potential")
{
    // Radial p-harmonic oracle: u' ~ r^(-1/(p-1)), so u = (1 - r^q) / (1 - 0.4^q), q = (p-2)/(p-1).
    const double p = 64.0, q = (p - 2.0) / (p - 1.0);
    const GridPtr g = build_grid(fixtures::annulus(), h64);
    const ScalarField& inf = fixtures::solved("annulus", h64).V;
    SolveParams params;
    params.relaxation = 1.5;
    const ScalarField u = solve_p(g, p, params, &inf);
    const double radial = max_error(u, [&](Vec2 x) { return (1.0 - std::pow(norm(x), q)) / (1.0 - std::pow(0.4, q)); });
    MESSAGE("p=64 annulus: distance to radial p-harmonic ", radial, ", to infinity potential ",
            max_interior_difference(u, inf));
    CHECK(radial <= 0.03);
    CHECK(max_interior_difference(u, inf) <= 0.03);
}

TEST_CASE("p_node_update: affine fields are fixed points for every p")
{
    const GridPtr g = build_grid(fixtures::ellipse(), h32);
    const ScalarField affine = sample_function(g, [](Vec2 x) { return 0.5 + 0.2 * x.x - 0.1 * x.y; });
    for (double p : {2.0, 3.0, 8.0, 64.0}) {
        double worst = 0.0;
        for (int k = 0; k < static_cast<int>(g->size()); ++k)
            if (g->is_interior(k)) worst = std::max(worst, std::abs(p_node_update(*g, affine.values, k, p) - affine.values[k]));
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("residual_infinity")
{
    const GridPtr g = build_grid(fixtures::square(), h32);
    SolveParams params;
    const ScalarField u = solve_infinity(g, params);
    CHECK(residual_infinity(u, params) <= 10.0 * params.tol_res / (h32 * h32));

    const ScalarField affine = sample_function(g, [](Vec2 x) { return 0.3 + 0.1 * x.x + 0.2 * x.y; });
    const MidrangeOperator op(g, params);
    double worst = 0.0;
    for (int k : op.interior_nodes())
        if (op.radius() < g->outer_distance(g->node(k)) && op.radius() < g->gamma_distance(g->node(k)) - g->r_gamma)
            worst = std::max(worst, std::abs(op.apply(k, affine.values) - affine.values[k]));
    CHECK(worst <= 1e-14);
}

TEST_CASE("residual_infinity: the analytic cone is consistent except at the apex")
{
    // Oracle: midrange of the exact cone at the exact stencil points. The scheme
    // differs from it only by bilinear interpolation, bounded by h^2 / (4 rho)
    // with rho the distance from the apex to the interpolation cells.
    const GridPtr g = build_grid(fixtures::disk(), h64);
    SolveParams params;
    const MidrangeOperator op(g, params);
    const double eps = op.radius();
    auto cone = [](Vec2 x) { return 1.0 - norm(x); };
    const ScalarField sampled = sample_function(g, cone);
    double apex = 0.0, far = 0.0, far_oracle_gap = 0.0;
    for (int k : op.interior_nodes()) {
        const Vec2 x = g->node(k);
        const double r = norm(x);
        const double res = std::abs(op.apply(k, sampled.values) - sampled.values[k]);
        if (r <= 4.0 * h64) {
            apex = std::max(apex, res / (h64 * h64));
            continue;
        }
        if (g->outer_distance(x) <= eps + 2.0 * h64 || r <= eps + 3.0 * h64) continue;
        double hi = -1e300, lo = 1e300;
        for (Vec2 d : op.directions()) {
            hi = std::max(hi, cone(x + d * eps));
            lo = std::min(lo, cone(x + d * eps));
        }
        const double oracle = 0.5 * (hi + lo);
        const double rho = r - eps - std::sqrt(2.0) * h64;
        far_oracle_gap = std::max(far_oracle_gap, std::abs(op.apply(k, sampled.values) - oracle) / (h64 * h64 / (4.0 * rho)));
        far = std::max(far, res / (h64 * h64));
    }
    CHECK(far_oracle_gap <= 1.0);
    MESSAGE("scaled cone residual: apex ", apex, ", elsewhere ", far);
    CHECK(apex > 4.0 * far);
}

TEST_CASE("properties: midrange monotonicity on random fields")
{
    const GridPtr g = build_grid(fixtures::hexagon(), h32);
    const MidrangeOperator op(g, SolveParams{});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> f(g->size());
    for (double& v : f) v = u(rng);
    const auto& nodes = op.interior_nodes();
    for (int trial = 0; trial < 200; ++trial) {
        const int k = nodes[static_cast<size_t>(u(rng) * nodes.size())];
        const int i = g->col(k), j = g->row(k);
        const int m = 4;
        const int di = static_cast<int>(u(rng) * (2 * m + 1)) - m, dj = static_cast<int>(u(rng) * (2 * m + 1)) - m;
        const int n = g->index(i + di, j + dj);
        if (n == k) continue;
        const double before = op.apply(k, f);
        std::vector<double> raised = f;
        raised[n] += 0.3 * u(rng);
        CHECK(op.apply(k, raised) >= before - 1e-15);
    }
}

TEST_CASE("properties: maximum principle and no interior extrema")
{
    const auto& s = fixtures::solved("hexagon", h64);
    const Grid& g = *s.V.grid;
    for (int k = 0; k < static_cast<int>(g.size()); ++k) {
        if (g.cls[k] == NodeClass::Exterior) continue;
        CHECK(s.V.values[k] >= 0.0);
        CHECK(s.V.values[k] <= 1.0);
        if (!g.is_interior(k)) continue;
        // The stencil only interpolates nodes within 4 cells, never node k itself.
        const int i = g.col(k), j = g.row(k);
        double lo = 2.0, hi = -1.0;
        for (int dj = -4; dj <= 4; ++dj)
            for (int di = -4; di <= 4; ++di) {
                const int n = g.index(i + di, j + dj);
                if (n == k || g.cls[n] == NodeClass::Exterior) continue;
                lo = std::min(lo, s.V.values[n]);
                hi = std::max(hi, s.V.values[n]);
            }
        CHECK(s.V.values[k] <= hi + 1e-7);
        CHECK(s.V.values[k] >= lo - 1e-7);
    }
}

TEST_CASE("properties: lexicographic and checkerboard sweeps agree")
{
    const GridPtr g = build_grid(fixtures::ellipse(), h32);
    SolveParams lex, board;
    board.order = SweepOrder::Checkerboard;
    const ScalarField a = solve_infinity(g, lex), b = solve_infinity(g, board);
    CHECK(max_interior_difference(a, b) <= 10.0 * lex.tol_res);
    // Reproducible run to run.
    CHECK(max_interior_difference(b, solve_infinity(g, board)) == 0.0);
}

TEST_CASE("properties: refinement reduces the change between levels")
{
    auto solve_at = [](double h) { return solve_infinity(build_grid(fixtures::ellipse(), h), SolveParams{}); };
    const ScalarField u16 = solve_at(1.0 / 16), u32 = solve_at(1.0 / 32), u64 = solve_at(1.0 / 64);
    auto diff = [](const ScalarField& coarse, const ScalarField& fine) {
        const Grid& g = *coarse.grid;
        double worst = 0.0;
        for (int k = 0; k < static_cast<int>(g.size()); ++k) {
            const Vec2 x = g.node(k);
            if (g.is_interior(k) && g.outer_distance(x) > 0.1 && g.gamma_distance(x) > 0.1)
                worst = std::max(worst, std::abs(coarse.values[k] - sample(fine, x)));
        }
        return worst;
    };
    const double d1 = diff(u16, u32), d2 = diff(u32, u64);
    MESSAGE("refinement changes: ", d1, " then ", d2);
    CHECK(d2 < d1);
}
