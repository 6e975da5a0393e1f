#pragma once

#include <vector>

#include "egoplan/optimizer.hpp"

namespace egoplan {

/// Largest of |V/v_m|, sqrt|A/a_m|, cbrt|J/j_m| over all axes and control points, and 1.
double exceed_ratio(const UniformBspline& spline, const PlannerConfig& config);

/// Stretches the knot interval by exceed_ratio(); control points are unchanged.
UniformBspline reallocate(const UniformBspline& spline, const PlannerConfig& config);

/**
 * Anisotropic displacement between a retimed spline and its reference.
 *
 * e(a) = phi_f(a T') - phi_s(a T) on uniform samples a in [0, 1] with
 * trapezoid weights; the along-tangent part is weighted by w_a and the
 * remainder by w_r. The tangent comes from phi_s. Gradient is with respect to
 * phi_f's control points.
 */
CostGrad fitting_term(const UniformBspline& phi_f, const UniformBspline& phi_s,
                      const FitWeights& weights);

/// Largest distance of phi_f(a T') from phi_s(a T) normal to phi_s's tangent, over `samples` values of a.
double max_radial_deviation(const UniformBspline& phi_f, const UniformBspline& phi_s,
                            int samples = 100);

struct RefineResult {
  UniformBspline spline;
  double ratio = 1.0;       ///< exceed_ratio of the input
  bool warning = false;     ///< refit rejected; `spline` is the reallocated input
  int iterations = 0;
  double lambda_f = 0.0;    ///< fitting weight of the accepted solve
  double radial_deviation = 0.0;
  std::vector<double> trace;
};

/**
 * Retimes phi_s by its exceed ratio, re-pins its boundary states, then
 * minimizes lambda_s J_s + lambda_d J_d + lambda_f J_f over the movable control
 * points. The solve is repeated (at most eight times) with lambda_d grown by
 * penalty_growth while the result exceeds the limits, and with lambda_f grown
 * while the radial deviation from phi_s exceeds s_f / 2. A spline already
 * within limits is returned unchanged.
 */
RefineResult refine(const UniformBspline& phi_s, const PlannerConfig& config,
                    const FitWeights& weights);

}  // namespace egoplan
