#pragma once

#include <functional>
#include <vector>

#include "ringflow/field.hpp"

namespace ringflow {

enum class SweepOrder { Lexicographic, Checkerboard };

struct SweepLog {
    int sweep = 0;
    double update = 0.0;  // max nodal change during the sweep
    double seconds = 0.0;
};

struct SolveParams {
    int stencil_m = 3;        // stencil radius in cells
    int directions = 16;      // number of unit directions, multiple of 8
    double tol_res = 1e-8;    // stop when the max nodal update drops below this
    int max_sweeps = 400000;
    SweepOrder order = SweepOrder::Lexicographic;
    // Over-relaxation factor for the sweeps. The midrange solver accepts
    // values in (0, 2) but only 1 keeps the iteration monotone.
    double relaxation = 1.0;
    int log_every = 0;  // 0 disables the callback
    std::function<void(const SweepLog&)> log;
};

void validate(const SolveParams& params);

// min{1, dist(x, outer boundary) / separation} with the boundary classes set.
ScalarField initial_guess(GridPtr grid);

// Discrete midrange operator: at each interior node, the value balancing the
// steepest ascending and descending stencil slopes. Arms that leave the ring
// are clipped at the boundary, which then supplies the value at that arm's end.
class MidrangeOperator {
public:
    MidrangeOperator(GridPtr grid, const SolveParams& params);

    double apply(int node, const std::vector<double>& u) const;
    const std::vector<Vec2>& directions() const { return dirs_; }
    const std::vector<int>& interior_nodes() const { return interior_; }
    double radius() const { return radius_; }
    // Number of interior nodes with at least one clipped arm.
    size_t clipped_nodes() const;

private:
    struct Arm {
        int base = 0;       // lower-left node of the interpolation cell, or -1 for a boundary arm
        double s = 0.0;     // fractional position inside the cell
        double t = 0.0;
        double length = 0.0;
        double value = 0.0;  // boundary value for clipped arms
    };

    double arm_value(const Arm& arm, const std::vector<double>& u) const;

    GridPtr grid_;
    double radius_ = 0.0;
    std::vector<Vec2> dirs_;
    std::vector<int> interior_;
    std::vector<Arm> regular_;      // relative arms shared by unclipped nodes (base is an offset)
    std::vector<int> special_of_;   // per node: -1 if regular, else index into special_
    std::vector<Arm> special_;      // directions() arms per clipped node, contiguous
};

// Midrange fixed point by Gauss-Seidel sweeps. Throws NoConvergence.
ScalarField solve_infinity(GridPtr grid, const SolveParams& params,
                           const ScalarField* initial = nullptr);

// Discrete p-harmonic function: nodewise minimization of the P1 p-Dirichlet
// energy on the criss-cross triangulation of the lattice. Throws NoConvergence.
ScalarField solve_p(GridPtr grid, double p, const SolveParams& params,
                    const ScalarField* initial = nullptr);

// Minimizer of that local energy over the value at interior node k, with every
// other value held fixed (one nonlinear Gauss-Seidel update, unrelaxed).
double p_node_update(const Grid& grid, const std::vector<double>& u, int k, double p,
                     double tol_res = 1e-8);

// max over interior nodes of |midrange(u) - u| / h^2.
double residual_infinity(const ScalarField& field, const SolveParams& params);

// Maximum of |a - b| over interior nodes.
double max_interior_difference(const ScalarField& a, const ScalarField& b);

}  // namespace ringflow
