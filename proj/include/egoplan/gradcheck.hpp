#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace egoplan {

struct GradcheckTerm {
  std::string name;
  double max_rel_error = 0.0;  ///< max |analytic - numeric| / max |numeric|, worst over instances
};

struct GradcheckReport {
  std::vector<GradcheckTerm> terms;  ///< J_s, J_c, J_d, J_f, total, in that order
  double tolerance = 1e-5;
  bool ok() const;
};

/**
 * Compares analytic gradients of every objective term with central finite
 * differences (step 1e-6 (1 + |x|)) on `instances` random splines per term.
 * `corrupt` names a term whose analytic gradient is deliberately perturbed, for
 * exercising the failure path.
 */
GradcheckReport run_gradcheck(std::uint64_t seed, int instances = 100,
                              const std::string& corrupt = {});

}  // namespace egoplan
