#include "egoplan/refinement.hpp"

#include <algorithm>
#include <cmath>

namespace egoplan {

double exceed_ratio(const UniformBspline& spline, const PlannerConfig& config) {
  const auto d = derivative_ctrl_points(spline);
  double r = 1.0;
  for (const auto& v : d.vel) r = std::max(r, v.cwiseAbs().maxCoeff() / config.v_m);
  for (const auto& a : d.acc) r = std::max(r, std::sqrt(a.cwiseAbs().maxCoeff() / config.a_m));
  for (const auto& j : d.jerk) r = std::max(r, std::cbrt(j.cwiseAbs().maxCoeff() / config.j_m));
  return r;
}

UniformBspline reallocate(const UniformBspline& spline, const PlannerConfig& config) {
  const double r = exceed_ratio(spline, config);
  if (r == 1.0) return spline;
  return spline.with_dt(r * spline.dt());
}

CostGrad fitting_term(const UniformBspline& phi_f, const UniformBspline& phi_s,
                      const FitWeights& weights) {
  const int n = weights.samples > 0 ? weights.samples : 2 * phi_f.num_ctrl();
  if (n < 2) throw PreconditionError("fitting term needs at least 2 samples");
  CostGrad out;
  out.grad.assign(phi_f.ctrl().size(), Vec3::Zero());
  const double tf = phi_f.duration();
  const double ts = phi_s.duration();
  const double h = 1.0 / (n - 1);
  for (int k = 0; k < n; ++k) {
    const double alpha = k * h;
    const double w = (k == 0 || k == n - 1) ? 0.5 * h : h;
    const Vec3 e = evaluate(phi_f, alpha * tf) - evaluate(phi_s, alpha * ts);
    const Vec3 vel = evaluate(phi_s, alpha * ts, 1);
    Vec3 de;
    if (vel.norm() < 1e-9) {
      out.value += w * weights.w_r * e.squaredNorm();
      de = 2.0 * w * weights.w_r * e;
    } else {
      const Vec3 tangent = vel.normalized();
      const double axial = e.dot(tangent);
      const Vec3 radial = e - axial * tangent;
      out.value += w * (weights.w_a * axial * axial + weights.w_r * radial.squaredNorm());
      de = 2.0 * w * (weights.w_a * axial * tangent + weights.w_r * radial);
    }
    const auto [seg, u] = locate(phi_f, alpha * tf);
    const Eigen::Vector4d b = basis_weights(u, 0);
    for (int m = 0; m < 4; ++m) out.grad[seg + m] += b[m] * de;
  }
  return out;
}

double max_radial_deviation(const UniformBspline& phi_f, const UniformBspline& phi_s,
                            int samples) {
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double alpha = samples > 1 ? double(k) / (samples - 1) : 0.0;
    Vec3 e = evaluate(phi_f, alpha * phi_f.duration()) - evaluate(phi_s, alpha * phi_s.duration());
    const Vec3 vel = evaluate(phi_s, alpha * phi_s.duration(), 1);
    if (vel.norm() >= 1e-9) {
      const Vec3 tangent = vel.normalized();
      e -= e.dot(tangent) * tangent;
    }
    worst = std::max(worst, e.norm());
  }
  return worst;
}

RefineResult refine(const UniformBspline& phi_s, const PlannerConfig& config,
                    const FitWeights& weights) {
  config.validate();
  weights.validate();
  RefineResult out;
  out.ratio = exceed_ratio(phi_s, config);
  if (out.ratio <= 1.0) {
    out.spline = phi_s;
    out.lambda_f = config.lambda_f;
    return out;
  }

  const double T = phi_s.duration();
  State start, goal;
  start.pos = evaluate(phi_s, 0.0, 0);
  start.vel = evaluate(phi_s, 0.0, 1);
  start.acc = evaluate(phi_s, 0.0, 2);
  goal.pos = evaluate(phi_s, T, 0);
  goal.vel = evaluate(phi_s, T, 1);
  goal.acc = evaluate(phi_s, T, 2);
  const UniformBspline retimed = pin_boundaries(phi_s.with_dt(out.ratio * phi_s.dt()), start, goal);

  // Each retry warm-starts from the last iterate and stiffens the term that failed:
  // lambda_d while limits are exceeded, then lambda_f while the shape drifts.
  constexpr int kMaxRounds = 8;
  double lambda_d = config.lambda_d;
  double lambda_f = config.lambda_f;
  Eigen::VectorXd x = pack_movable(retimed);
  bool accepted = false;
  for (int round = 0; round < kMaxRounds; ++round) {
    const Objective f = [&](const Eigen::VectorXd& xv, Eigen::VectorXd& g) {
      const UniformBspline s = unpack_movable(retimed, xv);
      std::vector<Vec3> grad(s.ctrl().size(), Vec3::Zero());
      double value = 0.0;
      auto accumulate = [&](double w, const CostGrad& term) {
        if (w == 0.0) return;
        value += w * term.value;
        for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += w * term.grad[i];
      };
      accumulate(config.lambda_s, smoothness(s));
      accumulate(lambda_d, feasibility(s, config));
      accumulate(lambda_f, fitting_term(s, phi_s, weights));
      g = pack_movable_grad(grad);
      return value;
    };
    const auto solved = minimize_lbfgs(f, x, config.solver);
    out.iterations += solved.iterations;
    out.trace = solved.trace;
    if (!solved.x.allFinite() || !std::isfinite(solved.value)) break;
    x = solved.x;
    UniformBspline refit = unpack_movable(retimed, solved.x);
    if (exceed_ratio(refit, config) > 1.0 + 1e-6) {
      lambda_d *= config.solver.penalty_growth;
      continue;
    }
    const double deviation = max_radial_deviation(refit, phi_s);
    if (!accepted || deviation < out.radial_deviation) {
      accepted = true;
      out.spline = std::move(refit);
      out.lambda_f = lambda_f;
      out.radial_deviation = deviation;
    }
    if (deviation <= 0.5 * config.s_f) break;
    lambda_f *= config.solver.penalty_growth;
  }
  if (!accepted) {
    out.spline = retimed;
    out.warning = true;
    out.lambda_f = config.lambda_f;
    out.radial_deviation = max_radial_deviation(retimed, phi_s);
  }
  return out;
}

}  // namespace egoplan
