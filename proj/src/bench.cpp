#include "egoplan/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace egoplan {

using nlohmann::json;

BenchSuite parse_bench_suite(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("bench suite is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidInput("bench suite must be an object");
  for (const auto& [k, v] : j.items()) {
    if (k != "warmups" && k != "trials" && k != "scenarios")
      throw InvalidInput("unknown field '" + k + "' in bench suite");
  }
  BenchSuite suite;
  if (j.contains("warmups")) {
    if (!j["warmups"].is_number_integer() || j["warmups"].get<int>() < 0)
      throw InvalidInput("warmups must be a non-negative integer");
    suite.warmups = j["warmups"];
  }
  if (j.contains("trials")) {
    if (!j["trials"].is_number_integer() || j["trials"].get<int>() < 1)
      throw InvalidInput("trials must be a positive integer");
    suite.trials = j["trials"];
  }
  if (!j.contains("scenarios") || !j["scenarios"].is_array() || j["scenarios"].empty())
    throw InvalidInput("bench suite needs a non-empty 'scenarios' list");
  for (const auto& entry : j["scenarios"]) {
    if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string())
      throw InvalidInput("each bench scenario needs a 'name'");
    for (const auto& [k, v] : entry.items()) {
      if (k != "name" && k != "scenario" && k != "file")
        throw InvalidInput("unknown field '" + k + "' in bench scenario");
    }
    BenchCase c;
    c.name = entry["name"];
    if (entry.contains("scenario")) {
      c.scenario = parse_scenario(entry["scenario"].dump(), base_dir);
    } else if (entry.contains("file") && entry["file"].is_string()) {
      std::filesystem::path f = entry["file"].get<std::string>();
      if (f.is_relative()) f = base_dir / f;
      c.scenario = load_scenario(f);
    } else {
      throw InvalidInput("bench scenario '" + c.name + "' needs 'scenario' or 'file'");
    }
    suite.cases.push_back(std::move(c));
  }
  return suite;
}

BenchSuite load_bench_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open bench suite " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_bench_suite(buf.str(), path.parent_path());
}

std::vector<BenchRow> run_bench(const BenchSuite& suite,
                                const std::vector<SearchAlgorithm>& algorithms) {
  std::vector<BenchRow> rows;
  for (const auto& c : suite.cases) {
    const World world = build_world(c.scenario);
    for (const auto algo : algorithms) {
      for (int w = 0; w < suite.warmups; ++w) run_search(algo, world.inflated, c.scenario.start.pos, c.scenario.goal);
      for (int t = 0; t < suite.trials; ++t) {
        const auto r = run_search(algo, world.inflated, c.scenario.start.pos, c.scenario.goal);
        rows.push_back({c.name, algo, t, r.elapsed, r.expanded, r.cost});
      }
    }
  }
  return rows;
}

void write_metrics_csv(std::ostream& out, const std::vector<BenchRow>& rows, bool with_time) {
  out << "scenario,algorithm,trial,time_s,expanded,cost_m\n";
  char buf[64];
  for (const auto& r : rows) {
    out << r.scenario << ',' << to_string(r.algorithm) << ',' << r.trial << ',';
    if (with_time) {
      std::snprintf(buf, sizeof buf, "%.9f", r.time_s);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.9f", r.cost_m);
    out << ',' << r.expanded << ',' << buf << '\n';
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<BenchSummary> summarize(const std::vector<BenchRow>& rows) {
  std::vector<BenchSummary> out;
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t j = i;
    std::vector<double> times, expanded;
    while (j < rows.size() && rows[j].scenario == rows[i].scenario &&
           rows[j].algorithm == rows[i].algorithm) {
      times.push_back(rows[j].time_s);
      expanded.push_back(static_cast<double>(rows[j].expanded));
      ++j;
    }
    out.push_back({rows[i].scenario, rows[i].algorithm, median(times), median(expanded), rows[i].cost_m});
    i = j;
  }
  return out;
}

}  // namespace egoplan
