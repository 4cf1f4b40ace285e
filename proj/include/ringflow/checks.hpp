#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ringflow/flow.hpp"
#include "ringflow/solver.hpp"

namespace ringflow {

enum class Status { Pass, Fail, ReportOnly, Skipped };

std::string to_string(Status s);

struct Verdict {
    std::string name;
    std::string anchor;  // the statement being checked, in words
    std::vector<std::pair<std::string, double>> measured;
    std::vector<std::pair<std::string, double>> thresholds;
    Status status = Status::ReportOnly;
    std::string note;

    bool failed() const { return status == Status::Fail; }
    double value(const std::string& key) const;  // measured or threshold; NaN if absent
};

struct CheckParams {
    double c_flux = 1.0;        // flux slack is c_flux * sqrt(h)
    double c_grad = 5.0;        // gradient slack is c_grad * h
    double delta_stop = 1e-3;
    double tol_merge = 0.0;     // 0 selects default_merge_tolerance
    double tol_res = 1e-8;      // solver tolerance the field was computed with
    int seeds_per_side = 16;
};

// Oriented flux of |grad V|^(p-2) grad V through a closed counterclockwise
// contour, normalized by length * (max |grad V| on it)^(p-1). Passes iff the
// normalized flux is at most c_flux * sqrt(h). Throws ContourTouchesBoundary
// when the contour comes within 2h of either boundary.
Verdict flux_check(const ScalarField& field, const VectorField& vf, const Polyline& contour, double p,
                   const CheckParams& params = {});

// -(p-1) * area integral of |grad W|^p >= flux of |grad W|^(p-2) grad W, with
// W = log V; the violation is normalized like flux_check.
Verdict log_flux_check(const ScalarField& field, const VectorField& vf, const Polyline& contour,
                       double p, const CheckParams& params = {});

// Raw quadratures used by the two flux checks.
struct FluxMeasure {
    double flux = 0.0;       // contour integral
    double area_term = 0.0;  // -(p-1) * area integral (log variant only)
    double length = 0.0;
    double max_grad = 0.0;   // max gradient norm on the contour
    // Both terms divided by length * max_grad^(p-1).
    double normalized_flux = 0.0;
    double normalized_area = 0.0;
};
FluxMeasure measure_flux(const ScalarField& field, const VectorField& vf, const Polyline& contour,
                         double p, bool log_field);

Verdict gradient_bounds_check(const ScalarField& field, const VectorField& vf,
                              const CheckParams& params = {});

// Throws NotAPoint unless the inner boundary is a point.
Verdict inner_limit_check(const ScalarField& field, const VectorField& vf,
                          const CheckParams& params = {});

Verdict outer_lower_bound_check(const ScalarField& field, const VectorField& vf,
                                const CheckParams& params = {});

// Sup of |grad V| on the level-b arc between the two streamlines against the
// sup on the level-a arc. Skipped when the streamlines merge below level b.
Verdict speed_level_check(const ScalarField& field, const VectorField& vf, const Streamline& s1,
                          const Streamline& s2, double a, double b, const CheckParams& params = {});

struct GradientLimits {
    double alpha = 0.0;  // max |grad V| near the boundary point
    double beta = 0.0;   // min |grad V| on the annulus around the inner boundary
    double alpha_window = 0.0;
    double beta_inner = 0.0;
    double beta_outer = 0.0;
};

// Nodes of the annulus 4h <= dist(x, Gamma) <= 8h, shifted outward by the
// capture radius when that exceeds h.
std::vector<int> gamma_annulus(const Grid& grid);

struct ClCriterionResult {
    GradientLimits limits;
    Verdict verdict;
};

// When beta > alpha + margin, two streamlines seeded 4h apart next to xi0 must
// merge below 1 - delta_stop (2h spacing is tried when 4h does not merge).
ClCriterionResult cl_criterion(const ScalarField& field, const VectorField& vf, Vec2 xi0,
                               const CheckParams& params = {}, double margin = 0.1);

// Seeds on the outer boundary farther than separation + 4h from a point inner
// boundary must each merge with a neighbouring seed's streamline. Skipped on
// stadiums; throws NotAPoint otherwise.
Verdict theorem_single_check(const ScalarField& field, const VectorField& vf,
                             const CheckParams& params = {}, int samples = 64);

// Gluing identity for a segment inner boundary lying on the high ridge:
// V equals the point-Gamma potentials beyond the segment ends and the
// normalized boundary distance alongside it. Solves three problems at spacing
// h. Throws GammaNotOnRidge.
Verdict hr_glued_check(const ConvexRing& ring, double h, const SolveParams& solve,
                       const CheckParams& params = {}, double r_gamma = 0.0);

// Verdicts for the square [-1,1]^2 with a point inner boundary at the origin.
// Throws WrongFixture for any other ring.
std::vector<Verdict> square_suite(const ScalarField& field, const VectorField& vf,
                                  const CheckParams& params = {});

// Axis-aligned rectangle contour, counterclockwise.
Polyline rectangle_contour(Vec2 lo, Vec2 hi);
Polyline circle_contour(Vec2 c, double r, int n);

// n axis-aligned rectangles D with D compactly inside the ring: every side at
// least 8h, the closed rectangle at least 3h from both boundaries. Drawn with
// std::mt19937_64 from `seed`. Throws ValidationError if none fit.
std::vector<Polyline> random_rectangle_contours(const Grid& grid, int n, std::uint64_t seed);

bool all_passed(const std::vector<Verdict>& verdicts);

}  // namespace ringflow
