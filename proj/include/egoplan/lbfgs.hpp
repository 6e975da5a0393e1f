#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "egoplan/config.hpp"

namespace egoplan {

enum class SolveStatus { kGradientConverged, kStalled, kMaxIterations, kLineSearchFailed };

struct SolveResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::kMaxIterations;
  std::vector<double> trace;  ///< objective after each accepted step, starting with f(x0)
};

/// Returns f(x) and writes the gradient into `grad` (already sized).
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

/**
 * Limited-memory quasi-Newton minimization with Armijo backtracking
 * (sufficient-decrease constant 1e-4, step halving).
 */
SolveResult minimize_lbfgs(const Objective& f, Eigen::VectorXd x0, const SolverSettings& settings);

}  // namespace egoplan
