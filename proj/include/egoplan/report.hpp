#pragma once

#include <string>

#include "egoplan/bench.hpp"
#include "egoplan/gradcheck.hpp"
#include "egoplan/simulate.hpp"

namespace egoplan {

/// Pretty-printed JSON documents for the CLI and bindings. Timings are the only non-deterministic fields.
std::string plan_report_json(const PlanReport& report);
std::string sim_report_json(const SimReport& report);
std::string gradcheck_json(const GradcheckReport& report);
std::string bench_summary_json(const std::vector<BenchSummary>& summary);

}  // namespace egoplan
