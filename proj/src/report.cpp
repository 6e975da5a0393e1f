#include "egoplan/report.hpp"

#include <cmath>

#include <json.hpp>

namespace egoplan {

using nlohmann::json;

namespace {

json summary_json(const UniformBspline& s) {
  const auto m = summarize(s);
  return {{"num_ctrl", m.num_ctrl}, {"dt", m.dt}, {"duration", m.duration}};
}

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

// JSON has no infinity; an empty trace or a clearance with no anchors reports null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string plan_report_json(const PlanReport& r) {
  json j;
  j["search"] = {{"cost_m", r.search.cost},
                 {"expanded", r.search.expanded},
                 {"path_vertices", r.search.path.size()}};
  j["guide_vertices"] = r.guide.size();
  j["initial"] = summary_json(r.initial);
  j["phi_s"] = summary_json(r.phi_s);
  j["phi_f"] = summary_json(r.phi_f);
  j["timings_s"] = {{"search", r.timings.search},     {"prune", r.timings.prune},
                    {"fit", r.timings.fit},           {"optimize", r.timings.optimize},
                    {"refine", r.timings.refine},     {"validate", r.timings.validate},
                    {"total", r.timings.total}};
  j["optimize_traces"] = r.optimize_traces;
  j["refine_trace"] = r.refine_trace;
  j["anchor_rounds"] = r.anchor_rounds;
  j["anchor_count"] = r.anchor_count;
  j["lambda_c"] = r.lambda_c;
  j["lambda_f"] = r.lambda_f;
  j["anchor_clearance_m"] = finite_or_null(r.anchor_clearance);
  j["clearance_m"] = finite_or_null(r.clearance);
  j["exceed_ratio_before"] = r.exceed_ratio_before;
  j["exceed_ratio_after"] = r.exceed_ratio_after;
  j["radial_deviation_m"] = r.radial_deviation;
  j["refine_warning"] = r.refine_warning;
  j["start"] = vec(r.guide.empty() ? Vec3::Zero() : r.guide.front());
  j["goal"] = vec(r.guide.empty() ? Vec3::Zero() : r.guide.back());
  return j.dump(2) + "\n";
}

std::string sim_report_json(const SimReport& r) {
  json j = {{"success", r.success},         {"collision", r.collision},
            {"timed_out", r.timed_out},     {"plans", r.plans},
            {"replans", r.replans},         {"failed_plans", r.failed_plans},
            {"path_length_m", r.path_length}, {"time_s", r.time}};
  return j.dump(2) + "\n";
}

std::string gradcheck_json(const GradcheckReport& r) {
  json terms = json::object();
  for (const auto& t : r.terms) terms[t.name] = t.max_rel_error;
  json j = {{"tolerance", r.tolerance}, {"max_rel_error", terms}, {"ok", r.ok()}};
  return j.dump(2) + "\n";
}

std::string bench_summary_json(const std::vector<BenchSummary>& summary) {
  json rows = json::array();
  for (const auto& s : summary) {
    rows.push_back({{"scenario", s.scenario},
                    {"algorithm", std::string(to_string(s.algorithm))},
                    {"median_time_s", s.median_time_s},
                    {"median_expanded", s.median_expanded},
                    {"cost_m", s.cost_m}});
  }
  return rows.dump(2) + "\n";
}

}  // namespace egoplan
