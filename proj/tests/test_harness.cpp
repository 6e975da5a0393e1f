#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "egoplan/artifacts.hpp"
#include "egoplan/report.hpp"

using namespace egoplan;

namespace {

const std::filesystem::path kData = EGOPLAN_DATA_DIR;

constexpr const char* kMinimal = R"({
  "bounds": {"min": [0, 0, 0], "max": [10, 6, 3]},
  "map": {"type": "boxes", "boxes": []},
  "start": {"pos": [1, 3, 1.5]},
  "goal": [8, 3, 1.5]
})";

std::string csv_of(const UniformBspline& s) {
  std::ostringstream out;
  write_trajectory_csv(out, s);
  return out.str();
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

std::string svg_for(const Scenario& sc) {
  const World w = build_world(sc);
  const PlanReport r = plan_once(sc, w);
  RenderInput in{&w.raw, r.guide, sample_positions(r.phi_s, 200), sample_positions(r.phi_f, 200),
                 sc.start.pos, sc.goal};
  return render_svg(in);
}

}  // namespace

TEST(Scenario, MinimalDocumentUsesDefaults) {
  const Scenario sc = parse_scenario(kMinimal);
  EXPECT_EQ(sc.map.kind, MapKind::kBoxes);
  EXPECT_DOUBLE_EQ(sc.resolution, 0.1);
  EXPECT_DOUBLE_EQ(sc.config.s_f, 0.3);
  EXPECT_EQ(sc.algorithm, SearchAlgorithm::kBidirectional);
  EXPECT_EQ(sc.goal, Vec3(8, 3, 1.5));
}

TEST(Scenario, RoundTripsThroughJson) {
  Scenario sc = parse_scenario(kMinimal);
  sc.config.v_m = 1.5;
  sc.config.solver.max_anchor_rounds = 7;
  sc.map.boxes.push_back({Vec3(1, 1, 0), Vec3(2, 2, 3)});
  const std::string text = scenario_to_json(sc);
  EXPECT_EQ(scenario_to_json(parse_scenario(text)), text);
}

TEST(Scenario, RejectsUnknownFieldsAtEveryLevel) {
  auto with = [](const std::string& from, const std::string& to) {
    std::string s = kMinimal;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  EXPECT_THROW(parse_scenario(with("\"goal\"", "\"colour\": 1, \"goal\"")), InvalidInput);
  EXPECT_THROW(parse_scenario(with("\"boxes\": []", "\"boxes\": [], \"height\": 2")), InvalidInput);
  EXPECT_THROW(parse_scenario(with("\"pos\"", "\"jerk\": [0,0,0], \"pos\"")), InvalidInput);
  EXPECT_THROW(parse_scenario(with("\"goal\"", "\"solver\": {\"iters\": 3}, \"goal\"")), InvalidInput);
  EXPECT_THROW(parse_scenario(with("\"goal\"", "\"limits\": {\"v_max\": 3}, \"goal\"")), InvalidInput);
}

TEST(Scenario, RejectsMalformedValues) {
  EXPECT_THROW(parse_scenario("{"), InvalidInput);
  EXPECT_THROW(parse_scenario(R"({"bounds": {"min": [0,0,0], "max": [1,1,1]}})"), InvalidInput);
  std::string bad = kMinimal;
  bad.replace(bad.find("[8, 3, 1.5]"), 11, "[8, 3]");
  EXPECT_THROW(parse_scenario(bad), InvalidInput);
  bad = kMinimal;
  bad.replace(bad.find("\"goal\""), 6, "\"limits\": {\"v_m\": -1}, \"goal\"");
  EXPECT_THROW(parse_scenario(bad), InvalidInput);
  bad = kMinimal;
  bad.replace(bad.find("\"boxes\""), 7, "\"type2\"");
  EXPECT_THROW(parse_scenario(bad), InvalidInput);
  EXPECT_THROW(load_scenario(kData / "missing.json"), IoError);
}

TEST(Scenario, BlockedStartIsInvalidInput) {
  std::string s = kMinimal;
  s.replace(s.find("\"boxes\": []"), 11, R"("boxes": [{"min": [0.5, 2.5, 1], "max": [1.5, 3.5, 2]}])");
  EXPECT_THROW(build_world(parse_scenario(s)), InvalidInput);
}

TEST(Yaw, FollowsPlanarVelocity) {
  std::vector<Vec3> east, north;
  for (int i = 0; i < 6; ++i) {
    east.emplace_back(i, 0, 1 + 0.1 * i);
    north.emplace_back(0, i, 1);
  }
  EXPECT_NEAR(yaw_from_velocity(UniformBspline(east, 0.5), 0.7), 0.0, 1e-12);
  EXPECT_NEAR(yaw_from_velocity(UniformBspline(north, 0.5), 0.7), std::numbers::pi / 2, 1e-12);
}

TEST(Yaw, HoveringHoldsZero) {
  const UniformBspline hover(std::vector<Vec3>(6, Vec3(1, 2, 3)), 0.5);
  std::istringstream rows(csv_of(hover));
  std::string line;
  std::getline(rows, line);
  int n = 0;
  while (std::getline(rows, line)) {
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "0.000000");
    ++n;
  }
  EXPECT_EQ(n, 151);  // 1.5 s at 0.01 s, both ends
}

TEST(Artifacts, TrajectoryCsvLayout) {
  std::vector<Vec3> q;
  for (int i = 0; i < 8; ++i) q.emplace_back(0.4 * i, 0, 1);
  const std::string csv = csv_of(UniformBspline(q, 0.2));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,x,y,z,vx,vy,vz,ax,ay,az,yaw");
  EXPECT_EQ(count_of(csv, "\n"), 1u + 101u);
  EXPECT_NE(csv.find("\n0.50,"), std::string::npos);
  EXPECT_EQ(csv.find("-0.000000"), std::string::npos);
}

TEST(Artifacts, PathCsvRoundTrip) {
  const Path p{Vec3(1, 2, 3), Vec3(-0.5, 4.25, 0)};
  std::ostringstream out;
  write_path_csv(out, p);
  const auto file = std::filesystem::temp_directory_path() / "egoplan_path_roundtrip.csv";
  write_text_file(file, out.str());
  const Path back = read_points_csv(file);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1], p[1]);
  std::filesystem::remove(file);
  EXPECT_THROW(write_text_file("/nonexistent-dir/x.svg", "x"), IoError);
}

TEST(Artifacts, SvgIsDeterministicAndEmptyMapHasNoObstacles) {
  const Scenario sc = load_scenario(kData / "scenarios/empty.json");
  const std::string a = svg_for(sc);
  EXPECT_EQ(a, svg_for(sc));
  EXPECT_EQ(count_of(a, "class=\"obstacle\""), 0u);
  for (const char* cls : {"guide", "phi_s", "phi_f", "start", "goal"})
    EXPECT_EQ(count_of(a, std::string("class=\"") + cls + "\""), 1u) << cls;
}

TEST(Artifacts, ForestObstacleCountMatchesPillarFootprint) {
  const Scenario sc = forest_scenario(7, 0.1);
  const World w = build_world(sc);
  // Independent count: column centers inside any pillar disc.
  const Vec3 keep[] = {sc.start.pos, sc.goal};
  const auto pillars = forest_pillars(7, 0.1, sc.bounds, keep);
  std::size_t footprint = 0;
  for (int j = 0; j < 200; ++j)
    for (int i = 0; i < 200; ++i) {
      const double x = 0.05 + 0.1 * i, y = 0.05 + 0.1 * j;
      for (const auto& p : pillars) {
        if (std::hypot(x - p.x, y - p.y) <= p.radius) {
          ++footprint;
          break;
        }
      }
    }
  EXPECT_EQ(footprint, 1343u);
  EXPECT_EQ(occupied_columns(w.raw), footprint);
  RenderInput in{&w.raw, {sc.start.pos, sc.goal}, {}, {}, sc.start.pos, sc.goal};
  EXPECT_EQ(count_of(render_svg(in), "class=\"obstacle\""), footprint);
}

TEST(PlanOnce, EmptyMapNeedsNoAnchors) {
  const PlanReport r = plan_once(load_scenario(kData / "scenarios/empty.json"));
  EXPECT_EQ(r.anchor_count, 0u);
  EXPECT_EQ(r.anchor_rounds, 1);
  EXPECT_NEAR(r.exceed_ratio_after, 1.0, 1e-6);
  EXPECT_GT(r.clearance, 0.0);
  for (double t : {r.timings.search, r.timings.prune, r.timings.fit, r.timings.optimize,
                   r.timings.refine, r.timings.validate, r.timings.total})
    EXPECT_GE(t, 0.0);
}

TEST(PlanOnce, ForestSeed7KeepsClearance) {
  const Scenario sc = load_scenario(kData / "scenarios/forest_seed7.json");
  const World w = build_world(sc);
  const PlanReport r = plan_once(sc, w);
  EXPECT_GE(r.anchor_clearance, sc.config.s_f - 1e-3);
  EXPECT_TRUE(samples_free(r.phi_f, w.inflated, 200));
  EXPECT_NEAR(r.exceed_ratio_after, 1.0, 1e-6);
  EXPECT_GE(r.clearance, 0.0);
  EXPECT_LT((evaluate(r.phi_f, 0.0) - sc.start.pos).norm(), 1e-9);
  EXPECT_LT((evaluate(r.phi_f, r.phi_f.duration()) - sc.goal).norm(), 1e-9);
}

TEST(PlanOnce, SealedGoalFailsInSearch) {
  EXPECT_THROW(plan_once(load_scenario(kData / "scenarios/sealed_goal.json")), NoPathError);
}

TEST(PlanOnce, TrajectoryCsvIsReproducible) {
  const Scenario sc = load_scenario(kData / "scenarios/slab.json");
  EXPECT_EQ(csv_of(plan_once(sc).phi_f), csv_of(plan_once(sc).phi_f));
}

TEST(Simulate, KnownEmptyMapNeedsOnePlan) {
  const Scenario sc = load_scenario(kData / "scenarios/empty.json");
  SimOptions o;
  o.sensing_radius = 50.0;
  o.horizon = 50.0;
  const SimReport r = simulate(sc, o);
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.plans, 1);
  EXPECT_EQ(r.replans, 0);
  EXPECT_NEAR(r.path_length, 7.0, 1e-6);
}

TEST(Simulate, ForestSeed7ReplansUnderLimitedSensing) {
  const Scenario sc = forest_scenario(7, 0.1);
  const World w = build_world(sc);
  SimOptions o;
  o.sensing_radius = 5.0;
  const SimReport r = simulate(sc, w, o);
  EXPECT_TRUE(r.success);
  EXPECT_FALSE(r.collision);
  EXPECT_EQ(r.replans, 8);
  for (const auto& p : r.positions) EXPECT_FALSE(w.raw.occupied(p));
}

TEST(Simulate, RejectsNonPositiveSensing) {
  SimOptions o;
  o.sensing_radius = 0.0;
  EXPECT_THROW(simulate(parse_scenario(kMinimal), o), PreconditionError);
}

TEST(Gradcheck, ListsExactlyTheObjectiveTerms) {
  const auto r = run_gradcheck(0, 100);
  ASSERT_EQ(r.terms.size(), 5u);
  const char* names[] = {"J_s", "J_c", "J_d", "J_f", "total"};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(r.terms[i].name, names[i]);
    EXPECT_LT(r.terms[i].max_rel_error, 1e-5) << names[i];
  }
  EXPECT_TRUE(r.ok());
}

TEST(Gradcheck, CorruptedTermFails) {
  const auto r = run_gradcheck(0, 5, "J_d");
  EXPECT_FALSE(r.ok());
  EXPECT_GT(r.terms[2].max_rel_error, 1e-5);
  EXPECT_LT(r.terms[0].max_rel_error, 1e-5);
}

TEST(Bench, CostParityAndCsvHeader) {
  const BenchSuite suite = parse_bench_suite(R"({"warmups": 0, "trials": 2, "scenarios": [
    {"name": "pillars", "scenario": {"seed": 3, "bounds": {"min": [0,0,0], "max": [12,8,3]},
     "resolution": 0.25, "map": {"type": "random", "probability": 0.15, "inflation": 0.0},
     "start": {"pos": [0.5, 4.1, 1.4]}, "goal": [11.5, 4.1, 1.4]}}]})");
  const auto rows = run_bench(suite, {SearchAlgorithm::kDijkstra, SearchAlgorithm::kAStar,
                                      SearchAlgorithm::kBidirectional});
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& r : rows) EXPECT_NEAR(r.cost_m, rows[0].cost_m, 1e-9);
  std::ostringstream a, b;
  write_metrics_csv(a, rows, false);
  write_metrics_csv(b, run_bench(suite, {SearchAlgorithm::kDijkstra, SearchAlgorithm::kAStar,
                                         SearchAlgorithm::kBidirectional}),
                    false);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "scenario,algorithm,trial,time_s,expanded,cost_m");
  const auto summary = summarize(rows);
  ASSERT_EQ(summary.size(), 3u);
  EXPECT_EQ(summary[2].algorithm, SearchAlgorithm::kBidirectional);
}

TEST(Bench, SuiteValidation) {
  EXPECT_THROW(parse_bench_suite(R"({"scenarios": []})"), InvalidInput);
  EXPECT_THROW(parse_bench_suite(R"({"trials": 0, "scenarios": [{"name": "a", "file": "x.json"}]})"),
               InvalidInput);
  EXPECT_THROW(parse_bench_suite(R"({"repeat": 2, "scenarios": []})"), InvalidInput);
  EXPECT_THROW(parse_bench_suite(R"({"scenarios": [{"name": "a"}]})"), InvalidInput);
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0, 10.0}), 2.5);
}

TEST(Report, PlanJsonHasStageFields) {
  const std::string j = plan_report_json(plan_once(load_scenario(kData / "scenarios/empty.json")));
  for (const char* key : {"\"timings_s\"", "\"phi_s\"", "\"phi_f\"", "\"clearance_m\"", "\"search\""})
    EXPECT_NE(j.find(key), std::string::npos) << key;
}
