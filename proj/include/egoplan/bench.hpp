#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "egoplan/scenario.hpp"

namespace egoplan {

struct BenchCase {
  std::string name;
  Scenario scenario;
};

struct BenchSuite {
  std::vector<BenchCase> cases;
  int warmups = 2;
  int trials = 11;
};

/**
 * Suite document: {"warmups": 2, "trials": 11, "scenarios": [{"name": ...,
 * "scenario": {...}} | {"name": ..., "file": "relative/path.json"}]}.
 */
BenchSuite parse_bench_suite(const std::string& text, const std::filesystem::path& base_dir = {});
BenchSuite load_bench_suite(const std::filesystem::path& path);

struct BenchRow {
  std::string scenario;
  SearchAlgorithm algorithm = SearchAlgorithm::kDijkstra;
  int trial = 0;
  double time_s = 0.0;
  std::size_t expanded = 0;
  double cost_m = 0.0;
};

/// Runs every algorithm on every case's inflated world; warmup runs are not reported.
std::vector<BenchRow> run_bench(const BenchSuite& suite, const std::vector<SearchAlgorithm>& algorithms);

/// Header scenario,algorithm,trial,time_s,expanded,cost_m. Without timing the time_s cells are empty.
void write_metrics_csv(std::ostream& out, const std::vector<BenchRow>& rows, bool with_time = true);

struct BenchSummary {
  std::string scenario;
  SearchAlgorithm algorithm = SearchAlgorithm::kDijkstra;
  double median_time_s = 0.0;
  double median_expanded = 0.0;
  double cost_m = 0.0;
};

std::vector<BenchSummary> summarize(const std::vector<BenchRow>& rows);

double median(std::vector<double> values);

}  // namespace egoplan
