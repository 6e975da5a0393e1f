#include "egoplan/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "egoplan/refinement.hpp"

namespace egoplan {

namespace {

using Term = std::function<CostGrad(const UniformBspline&)>;

double worst_error(const UniformBspline& s, const Term& term, bool corrupt) {
  auto analytic = term(s);
  if (corrupt) analytic.grad[analytic.grad.size() / 2] += Vec3(1.0, -1.0, 0.5) * (1.0 + analytic.grad[0].norm());
  auto ctrl = s.ctrl();
  double scale = 1e-8, err = 0.0;
  std::vector<double> numeric;
  for (std::size_t i = 0; i < ctrl.size(); ++i) {
    for (int r = 0; r < 3; ++r) {
      const double x0 = ctrl[i][r];
      const double h = 1e-6 * (1.0 + std::abs(x0));
      ctrl[i][r] = x0 + h;
      const double fp = term(s.with_ctrl(ctrl)).value;
      ctrl[i][r] = x0 - h;
      const double fm = term(s.with_ctrl(ctrl)).value;
      ctrl[i][r] = x0;
      const double g = (fp - fm) / (2 * h);
      scale = std::max(scale, std::abs(g));
      err = std::max(err, std::abs(analytic.grad[i][r] - g));
    }
  }
  return err / scale;
}

}  // namespace

bool GradcheckReport::ok() const {
  return std::all_of(terms.begin(), terms.end(),
                     [&](const GradcheckTerm& t) { return t.max_rel_error < tolerance; });
}

GradcheckReport run_gradcheck(std::uint64_t seed, int instances, const std::string& corrupt) {
  std::mt19937_64 rng(seed);
  auto u = [&] { return unit_uniform(rng()); };
  const PlannerConfig config;
  GradcheckReport report;
  for (const char* name : {"J_s", "J_c", "J_d", "J_f", "total"}) report.terms.push_back({name, 0.0});

  for (int n = 0; n < instances; ++n) {
    const int count = 6 + static_cast<int>(u() * 10);
    const double dt = 0.1 + 0.3 * u();
    std::vector<Vec3> q, q2;
    for (int i = 0; i < count; ++i) {
      q.emplace_back(0.4 * i + 0.6 * (u() - 0.5), 0.6 * (u() - 0.5), 1.0 + 0.6 * (u() - 0.5));
      q2.emplace_back(0.4 * i + 0.6 * (u() - 0.5), 0.6 * (u() - 0.5), 1.0 + 0.6 * (u() - 0.5));
    }
    const UniformBspline s(q, dt);
    const UniformBspline ref(q2, dt * (1.0 + u()));
    // Anchors span all three branches of the clearance penalty.
    AnchorSet anchors(count);
    for (int i = 0; i < count; ++i) {
      const int k = static_cast<int>(u() * 3);
      for (int m = 0; m < k; ++m) {
        const Vec3 v = Vec3(u() - 0.5, u() - 0.5, u() - 0.5).normalized();
        anchors.add(i, {q[i] - (-1.0 + 1.8 * u()) * v, v}, 8, 0.0);
      }
    }
    const Term terms[] = {
        [](const UniformBspline& x) { return smoothness(x); },
        [&](const UniformBspline& x) { return collision(x, anchors, config); },
        [&](const UniformBspline& x) { return feasibility(x, config); },
        [&](const UniformBspline& x) { return fitting_term(x, ref, FitWeights{}); },
        // Weighted sum without boundary masking so every coordinate is checked.
        [&](const UniformBspline& x) {
          CostGrad out;
          out.grad.assign(x.ctrl().size(), Vec3::Zero());
          const std::pair<double, CostGrad> parts[] = {
              {config.lambda_s, smoothness(x)},
              {config.lambda_c, collision(x, anchors, config)},
              {config.lambda_d, feasibility(x, config)},
              {config.lambda_f, fitting_term(x, ref, FitWeights{})}};
          for (const auto& [w, cg] : parts) {
            out.value += w * cg.value;
            for (std::size_t i = 0; i < out.grad.size(); ++i) out.grad[i] += w * cg.grad[i];
          }
          return out;
        },
    };
    for (std::size_t t = 0; t < report.terms.size(); ++t) {
      auto& entry = report.terms[t];
      entry.max_rel_error =
          std::max(entry.max_rel_error, worst_error(s, terms[t], entry.name == corrupt));
    }
  }
  return report;
}

}  // namespace egoplan
