#pragma once

#include <string>
#include <vector>

#include "egoplan/bspline.hpp"
#include "egoplan/collision_anchor.hpp"
#include "egoplan/config.hpp"
#include "egoplan/graph_search.hpp"
#include "egoplan/lbfgs.hpp"

namespace egoplan {

/// A scalar cost and its gradient with respect to every control point.
struct CostGrad {
  double value = 0.0;
  std::vector<Vec3> grad;
};

/// Scalar penalty with its first two derivatives at one argument.
struct PenaltyValue {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/**
 * Clearance penalty of c = s_f - d:
 *   0                                  c <= 0
 *   c^3                                0 < c <= s_f
 *   3 s_f c^2 - 3 s_f^2 c + s_f^3      c > s_f
 * Derivatives are with respect to c.
 */
PenaltyValue collision_penalty(double c, double s_f);

/// Quadratic-tail coefficients (a, b, c) of the feasibility penalty, C2 at the tail seam.
struct TailCoefficients {
  double a1, b1, c1;  ///< left tail, x < -c_j
  double a2, b2, c2;  ///< right tail, x > c_j
  double soft;        ///< lambda_e * limit
  double c_j;
};
TailCoefficients feasibility_tails(double limit, double lambda_e, double c_j_factor);

/// Per-axis feasibility penalty for one derivative component against `limit`.
PenaltyValue feasibility_penalty(double x, const TailCoefficients& k);

/// Sum of squared acceleration and jerk control points.
CostGrad smoothness(const UniformBspline& spline);

/// Sum of clearance penalties over every anchor of every control point.
CostGrad collision(const UniformBspline& spline, const AnchorSet& anchors,
                   const PlannerConfig& config);

/// Per-axis penalty over velocity, acceleration and jerk control points.
CostGrad feasibility(const UniformBspline& spline, const PlannerConfig& config);

/// Weighted sum of the three terms; the first and last three control points get zero gradient.
CostGrad total_objective(const UniformBspline& spline, const AnchorSet& anchors,
                         const PlannerConfig& config);

/// Indices of control points free to move: 3..N_c-4.
inline int first_movable() { return 3; }
inline int last_movable(const UniformBspline& s) { return s.num_ctrl() - 4; }

/// Packs the movable control points into a flat vector and back.
Eigen::VectorXd pack_movable(const UniformBspline& spline);
UniformBspline unpack_movable(const UniformBspline& base, const Eigen::VectorXd& x);
Eigen::VectorXd pack_movable_grad(const std::vector<Vec3>& grad);

struct OptimizeResult {
  UniformBspline spline;
  AnchorSet anchors;
  int rounds = 0;
  int iterations = 0;
  double lambda_c = 0.0;  ///< collision weight in effect for the final round
  std::vector<std::vector<double>> traces;  ///< objective trace per round
};

/// Smallest signed distance over all anchor pairs; +inf without anchors.
double min_anchor_clearance(const UniformBspline& spline, const AnchorSet& anchors);

class PlanningFailed : public Error {
 public:
  PlanningFailed(const std::string& stage, const std::string& what, UniformBspline best = {})
      : Error(stage + ": " + what), stage_(stage), best_(std::move(best)) {}
  const std::string& stage() const { return stage_; }
  const UniformBspline& best() const { return best_; }

 private:
  std::string stage_;
  UniformBspline best_;
};

/**
 * Minimizes the penalty objective over the movable control points.
 *
 * Each round detects collision segments, attaches anchor pairs built from a
 * local bidirectional-A* guide around the segment (falling back to `guide`),
 * and warm-starts the quasi-Newton solve. When points that already had
 * anchors end closer than s_f - clearance_tolerance, lambda_c grows by
 * penalty_growth for the next round (up to max_lambda_c). A round that finds
 * collisions but no new anchor re-anchors the colliding points from scratch.
 * Stops once the spline is collision free
 * and every anchor is satisfied. When rounds run out a collision-free spline is
 * still returned (its clearance may fall short); otherwise PlanningFailed is
 * thrown with the last iterate.
 */
OptimizeResult optimize(const UniformBspline& spline, const OccupancyGrid& grid,
                        const SearchResult& guide, const PlannerConfig& config);

/**
 * Anchor pairs for the current collisions; returns the number added.
 *
 * Segments with a point still behind one of its anchor planes are skipped.
 * With `reset`, anchors of every colliding point are discarded first and the
 * skip rule is off; this recovers points pinned by mutually exclusive planes.
 */
int add_collision_anchors(const UniformBspline& spline, const OccupancyGrid& grid,
                          const Path& guide, const PlannerConfig& config, AnchorSet& anchors,
                          bool reset = false);

}  // namespace egoplan
