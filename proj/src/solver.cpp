#include "ringflow/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ringflow/errors.hpp"

namespace ringflow {

namespace {

// Unit directions with exact dihedral symmetry: first-octant angles are
// reflected by swapping and negating components.
std::vector<Vec2> symmetric_directions(int k)
{
    const int per_octant = k / 8;
    std::vector<Vec2> octant;
    for (int q = 0; q <= per_octant; ++q) {
        const double a = (std::numbers::pi / 4.0) * q / per_octant;
        octant.push_back({std::cos(a), std::sin(a)});
    }
    octant.back() = {std::sqrt(0.5), std::sqrt(0.5)};
    std::vector<Vec2> first_quadrant = octant;
    for (int q = per_octant - 1; q >= 0; --q) first_quadrant.push_back({octant[q].y, octant[q].x});
    // first_quadrant now runs from angle 0 to pi/2 inclusive.
    std::vector<Vec2> dirs;
    for (size_t q = 0; q + 1 < first_quadrant.size(); ++q) dirs.push_back(first_quadrant[q]);
    for (size_t q = 0; q + 1 < first_quadrant.size(); ++q) dirs.push_back(perp(first_quadrant[q]));
    for (size_t q = 0; q + 1 < first_quadrant.size(); ++q) dirs.push_back(-first_quadrant[q]);
    for (size_t q = 0; q + 1 < first_quadrant.size(); ++q) dirs.push_back(-perp(first_quadrant[q]));
    return dirs;
}

void check_finite(const ScalarField& f)
{
    for (double v : f.values)
        if (!std::isfinite(v)) throw NumericalError("field contains non-finite values");
}

ScalarField prepare_start(const GridPtr& grid, const ScalarField* initial)
{
    ScalarField u = initial ? *initial : initial_guess(grid);
    if (u.values.size() != grid->size()) throw ValidationError("initial field does not match grid");
    check_finite(u);
    for (size_t k = 0; k < grid->size(); ++k) {
        if (grid->cls[k] == NodeClass::InnerBc) u.values[k] = 1.0;
        else if (grid->cls[k] != NodeClass::Interior) u.values[k] = 0.0;
    }
    u.grid = grid;
    return u;
}

// Colour classes whose members are farther apart than the operator's reach.
std::vector<std::vector<int>> colour_classes(const Grid& g, const std::vector<int>& nodes, int reach)
{
    const int period = reach + 1;
    std::vector<std::vector<int>> colours(static_cast<size_t>(period) * period);
    for (int k : nodes) colours[(g.col(k) % period) + period * (g.row(k) % period)].push_back(k);
    return colours;
}

template <class Update>
ScalarField run_sweeps(ScalarField u, const std::vector<int>& nodes, int reach,
                       const SolveParams& params, const char* name, Update update)
{
    const Grid& g = *u.grid;
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::vector<int>> colours;
    if (params.order == SweepOrder::Checkerboard) colours = colour_classes(g, nodes, reach);
    double omega = params.relaxation;
    double floor_update = std::numeric_limits<double>::infinity();
    int growing = 0;
    double last = std::numeric_limits<double>::infinity();
    constexpr size_t kWindow = 10;
    std::vector<double> history;
    for (int sweep = 1; sweep <= params.max_sweeps; ++sweep) {
        double worst = 0.0;
        if (params.order == SweepOrder::Lexicographic) {
            for (int k : nodes) {
                const double old = u.values[k];
                const double target = update(k, u.values);
                const double next = std::clamp(old + omega * (target - old), 0.0, 1.0);
                u.values[k] = next;
                worst = std::max(worst, std::abs(next - old));
            }
        } else {
            for (const auto& colour : colours) {
                const int count = static_cast<int>(colour.size());
#pragma omp parallel for reduction(max : worst) schedule(static)
                for (int q = 0; q < count; ++q) {
                    const int k = colour[q];
                    const double old = u.values[k];
                    const double target = update(k, u.values);
                    const double next = std::clamp(old + omega * (target - old), 0.0, 1.0);
                    u.values[k] = next;
                    worst = std::max(worst, std::abs(next - old));
                }
            }
        }
        if (!std::isfinite(worst)) throw NumericalError(std::string(name) + ": non-finite update");
        // A small update alone does not bound the distance to the fixed point
        // when the contraction is slow; require update * rate / (1 - rate) to
        // be small too, with the rate taken over the last window of sweeps.
        history.push_back(worst);
        // Over-relaxation can cycle on strongly nonlinear updates: when the
        // update keeps growing, halve the excess over 1 and start afresh.
        if (omega > 1.0) {
            growing = worst > 2.0 * floor_update ? growing + 1 : 0;
            floor_update = std::min(floor_update, worst);
            if (growing >= static_cast<int>(kWindow)) {
                omega = 1.0 + 0.5 * (omega - 1.0);
                growing = 0;
                floor_update = worst;
                history.clear();
            }
        }
        double tail = std::numeric_limits<double>::infinity();
        if (history.size() > kWindow) {
            const double prev = history[history.size() - 1 - kWindow];
            const double rate = prev > 0.0 ? std::pow(worst / prev, 1.0 / kWindow) : 0.0;
            if (rate < 1.0) tail = worst * rate / (1.0 - rate);
        }
        last = worst;
        const bool done = worst < params.tol_res && (worst == 0.0 || tail < params.tol_res);
        if (params.log && params.log_every > 0 && (sweep % params.log_every == 0 || done)) {
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            params.log({sweep, worst, secs});
        }
        if (done) return u;
    }
    throw NoConvergence(std::string(name) + ": sweep budget exhausted, last update " +
                            std::to_string(last),
                        params.max_sweeps, last);
}

}  // namespace

void validate(const SolveParams& params)
{
    if (params.stencil_m < 2) throw ValidationError("stencil radius must be at least 2");
    if (params.directions < 8 || params.directions % 8 != 0)
        throw ValidationError("stencil directions must be a multiple of 8, at least 8");
    if (!(params.tol_res > 0.0)) throw ValidationError("residual tolerance must be positive");
    if (params.max_sweeps < 1) throw ValidationError("max sweeps must be positive");
    if (!(params.relaxation > 0.0 && params.relaxation < 2.0))
        throw ValidationError("relaxation must lie in (0, 2)");
}

ScalarField initial_guess(GridPtr grid)
{
    const Grid& g = *grid;
    ScalarField u{grid, std::vector<double>(g.size(), 0.0)};
    for (size_t k = 0; k < g.size(); ++k) {
        switch (g.cls[k]) {
        case NodeClass::InnerBc: u.values[k] = 1.0; break;
        case NodeClass::Interior:
            u.values[k] = std::min(1.0, g.outer_distance(g.node(static_cast<int>(k))) / g.sep);
            break;
        default: break;
        }
    }
    return u;
}

MidrangeOperator::MidrangeOperator(GridPtr grid, const SolveParams& params)
    : grid_(std::move(grid))
{
    validate(params);
    const Grid& g = *grid_;
    radius_ = params.stencil_m * g.h;
    dirs_ = symmetric_directions(params.directions);

    for (const Vec2& d : dirs_) {
        const double fx = params.stencil_m * d.x, fy = params.stencil_m * d.y;
        const int ox = static_cast<int>(std::floor(fx)), oy = static_cast<int>(std::floor(fy));
        regular_.push_back({oy * g.nx + ox, fx - ox, fy - oy, radius_, 0.0});
    }

    const ConvexBody obstacle = g.inner_obstacle();
    special_of_.assign(g.size(), -1);
    for (int k = 0; k < static_cast<int>(g.size()); ++k) {
        if (!g.is_interior(k)) continue;
        interior_.push_back(k);
        const Vec2 x = g.node(k);
        const double margin = 1e-9 * g.h;
        if (g.outer_distance(x) > radius_ + margin && signed_distance(obstacle, x) > radius_ + margin)
            continue;
        std::vector<Arm> arms;
        bool clipped = false;
        for (size_t a = 0; a < dirs_.size(); ++a) {
            const Vec2 d = dirs_[a];
            double t_out = std::numeric_limits<double>::infinity();
            if (auto iv = line_interval(g.ring.outer, x, d)) t_out = iv->second;
            double t_in = std::numeric_limits<double>::infinity();
            if (auto iv = line_interval(obstacle, x, d); iv && iv->second >= 0.0)
                t_in = std::max(iv->first, 0.0);
            if (t_out < radius_ || t_in < radius_) {
                clipped = true;
                const bool inner_first = t_in <= t_out;
                arms.push_back({-1, 0.0, 0.0, std::max(inner_first ? t_in : t_out, 0.0),
                                inner_first ? 1.0 : 0.0});
            } else {
                Arm arm = regular_[a];
                arm.base += k;
                arms.push_back(arm);
            }
        }
        if (!clipped) continue;
        special_of_[k] = static_cast<int>(special_.size());
        special_.insert(special_.end(), arms.begin(), arms.end());
    }
}

size_t MidrangeOperator::clipped_nodes() const
{
    return special_.size() / dirs_.size();
}

double MidrangeOperator::arm_value(const Arm& arm, const std::vector<double>& u) const
{
    if (arm.base < 0) return arm.value;
    const int nx = grid_->nx;
    const double* p = u.data() + arm.base;
    const double s = arm.s, t = arm.t;
    return (1.0 - t) * ((1.0 - s) * p[0] + s * p[1]) + t * ((1.0 - s) * p[nx] + s * p[nx + 1]);
}

double MidrangeOperator::apply(int node, const std::vector<double>& u) const
{
    const size_t n = dirs_.size();
    const int sp = special_of_[node];
    if (sp < 0) {
        double hi = -std::numeric_limits<double>::infinity();
        double lo = std::numeric_limits<double>::infinity();
        for (const Arm& arm : regular_) {
            const int nx = grid_->nx;
            const double* p = u.data() + node + arm.base;
            const double v = (1.0 - arm.t) * ((1.0 - arm.s) * p[0] + arm.s * p[1]) +
                             arm.t * ((1.0 - arm.s) * p[nx] + arm.s * p[nx + 1]);
            if (v > hi) hi = v;
            if (v < lo) lo = v;
        }
        return 0.5 * (hi + lo);
    }
    // Unequal arms: the answer is fixed by the pair (i, j) with the steepest
    // chord slope (v_i - v_j) / (l_i + l_j).
    double vals[64], lens[64];
    const Arm* arms = special_.data() + static_cast<size_t>(sp);
    for (size_t a = 0; a < n; ++a) {
        vals[a] = arm_value(arms[a], u);
        lens[a] = arms[a].length;
    }
    double best = -std::numeric_limits<double>::infinity();
    size_t bi = 0, bj = 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            const double slope = (vals[i] - vals[j]) / (lens[i] + lens[j]);
            if (slope > best) {
                best = slope;
                bi = i;
                bj = j;
            }
        }
    const double li = lens[bi], lj = lens[bj];
    if (li + lj <= 0.0) return 0.5 * (vals[bi] + vals[bj]);
    return (lj * vals[bi] + li * vals[bj]) / (li + lj);
}

ScalarField solve_infinity(GridPtr grid, const SolveParams& params, const ScalarField* initial)
{
    validate(params);
    if (params.directions > 64) throw ValidationError("at most 64 stencil directions are supported");
    const MidrangeOperator op(grid, params);
    ScalarField u = prepare_start(grid, initial);
    const int reach = params.stencil_m + 1;
    return run_sweeps(std::move(u), op.interior_nodes(), reach, params, "solve_infinity",
                      [&](int k, const std::vector<double>& vals) { return op.apply(k, vals); });
}

namespace {

// Criss-cross P1 energy around one node. The node's value enters each
// triangle gradient affinely: g = a + u * b (gradients scaled by h).
struct LocalPEnergy {
    struct Term { Vec2 a; Vec2 b; };
    Term terms[16];
    int count = 0;

    void build(const Grid& g, const std::vector<double>& u, int k)
    {
        count = 0;
        const int i = g.col(k), j = g.row(k);
        for (int cj = j - 1; cj <= j; ++cj) {
            for (int ci = i - 1; ci <= i; ++ci) {
                const int base = g.index(ci, cj);
                double c[4] = {u[base], u[base + 1], u[base + g.nx], u[base + g.nx + 1]};
                const int me = (i - ci) + 2 * (j - cj);  // 0:00 1:10 2:01 3:11
                auto grads = [&](double mine, Vec2 out[4]) {
                    c[me] = mine;
                    const double u00 = c[0], u10 = c[1], u01 = c[2], u11 = c[3];
                    out[0] = {u10 - u00, u11 - u10};
                    out[1] = {u11 - u01, u01 - u00};
                    out[2] = {u10 - u00, u01 - u00};
                    out[3] = {u11 - u01, u11 - u10};
                };
                Vec2 g0[4], g1[4];
                grads(0.0, g0);
                grads(1.0, g1);
                for (int t = 0; t < 4; ++t) {
                    const Vec2 b = g1[t] - g0[t];
                    if (b.x == 0.0 && b.y == 0.0) continue;
                    terms[count++] = {g0[t], b};
                }
            }
        }
    }

    // Derivative and second derivative of sum |a + u b|^p / p, scaled by a
    // positive factor to keep large p finite.
    void derivatives(double u, double p, double& d1, double& d2) const
    {
        double big2 = 0.0;
        for (int q = 0; q < count; ++q) big2 = std::max(big2, norm2(terms[q].a + terms[q].b * u));
        d1 = 0.0;
        d2 = 0.0;
        if (big2 == 0.0) {
            for (int q = 0; q < count; ++q) d2 += norm2(terms[q].b);
            if (p > 2.0) d2 = 0.0;
            return;
        }
        const double big = std::sqrt(big2);
        const double half = 0.5 * (p - 2.0);
        for (int q = 0; q < count; ++q) {
            const Vec2 gq = (terms[q].a + terms[q].b * u) / big;
            const double m2 = norm2(gq);
            const double gb = dot(gq, terms[q].b);
            const double w = power(m2, half);  // |g|^(p-2)
            d1 += w * gb;
            d2 += w * norm2(terms[q].b);
            if (p > 2.0 && m2 > 0.0) d2 += (p - 2.0) * (w / m2) * gb * gb;
        }
        d2 /= big;
    }

    // x^e for x >= 0; exact repeated squaring when e is a whole number.
    static double power(double x, double e)
    {
        if (e == std::floor(e) && e < 1024.0) {
            double result = 1.0, base = x;
            for (auto n = static_cast<unsigned>(e); n > 0; n >>= 1) {
                if (n & 1u) result *= base;
                base *= base;
            }
            return result;
        }
        return std::pow(x, e);
    }
};

}  // namespace

double p_node_update(const Grid& g, const std::vector<double>& vals, int k, double p, double tol_res)
{
    LocalPEnergy e;
    e.build(g, vals, k);
    // The minimizer lies between the smallest and largest neighbour value.
    const int i = g.col(k), j = g.row(k);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
            if (di == 0 && dj == 0) continue;
            const double v = vals[g.index(i + di, j + dj)];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    // Newton steps below this are rounding noise.
    const double step_tol = 1e-4 * tol_res;
    double x = std::clamp(vals[k], lo, hi);
    for (int it = 0; it < 60 && hi - lo > step_tol; ++it) {
        double d1, d2;
        e.derivatives(x, p, d1, d2);
        if (d1 == 0.0) return x;
        if (d1 > 0.0) hi = x; else lo = x;
        if (d2 > 0.0 && std::abs(d1 / d2) < step_tol) return std::clamp(x - d1 / d2, lo, hi);
        double next = d2 > 0.0 ? x - d1 / d2 : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    return x;
}

ScalarField solve_p(GridPtr grid, double p, const SolveParams& params, const ScalarField* initial)
{
    validate(params);
    if (!(p >= 2.0) || !std::isfinite(p)) throw ValidationError("p must be finite and at least 2");
    const Grid& g = *grid;
    std::vector<int> nodes;
    for (int k = 0; k < static_cast<int>(g.size()); ++k)
        if (g.is_interior(k)) nodes.push_back(k);
    ScalarField u = prepare_start(grid, initial);

    auto update = [&](int k, const std::vector<double>& vals) {
        return p_node_update(g, vals, k, p, params.tol_res);
    };
    return run_sweeps(std::move(u), nodes, 1, params, "solve_p", update);
}

double residual_infinity(const ScalarField& field, const SolveParams& params)
{
    const MidrangeOperator op(field.grid, params);
    const double h = field.grid->h;
    double worst = 0.0;
    for (int k : op.interior_nodes())
        worst = std::max(worst, std::abs(op.apply(k, field.values) - field.values[k]));
    return worst / (h * h);
}

double max_interior_difference(const ScalarField& a, const ScalarField& b)
{
    const Grid& g = *a.grid;
    double worst = 0.0;
    for (size_t k = 0; k < g.size(); ++k)
        if (g.cls[k] == NodeClass::Interior) worst = std::max(worst, std::abs(a.values[k] - b.values[k]));
    return worst;
}

}  // namespace ringflow
