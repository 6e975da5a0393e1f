#include "egoplan/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace egoplan {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 50;

struct Correction {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

Eigen::VectorXd two_loop(const Eigen::VectorXd& g, const std::deque<Correction>& mem) {
  Eigen::VectorXd q = g;
  std::vector<double> alpha(mem.size());
  for (std::size_t k = mem.size(); k-- > 0;) {
    alpha[k] = mem[k].rho * mem[k].s.dot(q);
    q -= alpha[k] * mem[k].y;
  }
  if (!mem.empty()) {
    const auto& last = mem.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t k = 0; k < mem.size(); ++k) {
    const double beta = mem[k].rho * mem[k].y.dot(q);
    q += (alpha[k] - beta) * mem[k].s;
  }
  return -q;
}

}  // namespace

SolveResult minimize_lbfgs(const Objective& f, Eigen::VectorXd x0, const SolverSettings& settings) {
  SolveResult out;
  const auto n = x0.size();
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd g(n);
  double fx = f(x, g);
  out.trace.push_back(fx);

  std::deque<Correction> mem;
  Eigen::VectorXd x_new(n), g_new(n);
  int it = 0;
  out.status = SolveStatus::kMaxIterations;
  while (it < settings.max_iterations) {
    if (n == 0 || g.lpNorm<Eigen::Infinity>() < settings.grad_tolerance) {
      out.status = SolveStatus::kGradientConverged;
      break;
    }
    Eigen::VectorXd d = two_loop(g, mem);
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      mem.clear();
      d = -g;
      slope = -g.squaredNorm();
    }
    // Without curvature information, cap the first trial step to unit max-norm displacement.
    double step = mem.empty() ? std::min(1.0, 1.0 / d.lpNorm<Eigen::Infinity>()) : 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int h = 0; h < kMaxHalvings; ++h) {
      x_new = x + step * d;
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= fx + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.status = SolveStatus::kLineSearchFailed;
      break;
    }
    ++it;
    Correction c{x_new - x, g_new - g, 0.0};
    const double sy = c.s.dot(c.y);
    if (sy > 1e-12 * c.s.norm() * c.y.norm()) {
      c.rho = 1.0 / sy;
      mem.push_back(std::move(c));
      if (static_cast<int>(mem.size()) > settings.memory) mem.pop_front();
    }
    x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
    out.trace.push_back(fx);

    const int w = settings.stall_window;
    if (static_cast<int>(out.trace.size()) > w) {
      const double before = out.trace[out.trace.size() - 1 - w];
      if (before - fx <= settings.objective_tolerance * std::max(std::abs(before), 1e-10)) {
        out.status = SolveStatus::kStalled;
        break;
      }
    }
  }
  out.x = std::move(x);
  out.value = fx;
  out.iterations = it;
  return out;
}

}  // namespace egoplan
