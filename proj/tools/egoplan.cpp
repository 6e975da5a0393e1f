// egoplan command-line tool: plan, simulate, bench, gradcheck, render.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "egoplan/artifacts.hpp"
#include "egoplan/report.hpp"

namespace fs = std::filesystem;
using namespace egoplan;

namespace {

constexpr int kExitPlanningFailure = 2;
constexpr int kExitInvalidInput = 3;

Path sampled(const UniformBspline& s) { return sample_positions(s, kSafetySamples); }

std::string trajectory_text(const UniformBspline& s) {
  std::ostringstream out;
  write_trajectory_csv(out, s);
  return out.str();
}

std::string path_text(const Path& p) {
  std::ostringstream out;
  write_path_csv(out, p);
  return out.str();
}

int cmd_plan(const std::string& scenario_path, const fs::path& out_dir) {
  const Scenario sc = load_scenario(scenario_path);
  const World world = build_world(sc);
  const PlanReport r = plan_once(sc, world);
  fs::create_directories(out_dir);
  write_text_file(out_dir / "trajectory.csv", trajectory_text(r.phi_f));
  write_text_file(out_dir / "phi_s.csv", trajectory_text(r.phi_s));
  write_text_file(out_dir / "guide.csv", path_text(r.guide));
  write_text_file(out_dir / "report.json", plan_report_json(r));
  RenderInput in{&world.raw, r.guide, sampled(r.phi_s), sampled(r.phi_f), sc.start.pos, sc.goal};
  write_text_file(out_dir / "plan.svg", render_svg(in));
  std::printf("planned %.2f s trajectory, %d control points, clearance %.3f m, %d anchor rounds%s\n",
              r.phi_f.duration(), r.phi_f.num_ctrl(), r.clearance, r.anchor_rounds,
              r.refine_warning ? " (refine warning)" : "");
  return 0;
}

int cmd_simulate(const std::string& scenario_path, const SimOptions& opts, const std::string& out) {
  const Scenario sc = load_scenario(scenario_path);
  const SimReport r = simulate(sc, opts);
  std::cout << sim_report_json(r);
  if (!out.empty()) write_text_file(out, path_text(r.positions));
  return r.success ? 0 : kExitPlanningFailure;
}

int cmd_bench(const std::string& suite_path, const std::string& algos, const std::string& out,
              bool no_time) {
  const BenchSuite suite = load_bench_suite(suite_path);
  std::vector<SearchAlgorithm> list;
  std::stringstream ss(algos);
  for (std::string name; std::getline(ss, name, ',');) {
    try {
      list.push_back(parse_algorithm(name));
    } catch (const Error& e) {
      throw InvalidInput(e.what());
    }
  }
  if (list.empty()) throw InvalidInput("--algos needs at least one algorithm");
  const auto rows = run_bench(suite, list);
  std::ostringstream csv;
  write_metrics_csv(csv, rows, !no_time);
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(out, csv.str());
  }
  std::cerr << bench_summary_json(summarize(rows));
  return 0;
}

int cmd_gradcheck(std::uint64_t seed, int instances, const std::string& corrupt) {
  const auto r = run_gradcheck(seed, instances, corrupt);
  std::cout << gradcheck_json(r);
  return r.ok() ? 0 : 1;
}

int cmd_render(const std::string& scenario_path, const std::string& guide, const std::string& phi_s,
               const std::string& phi_f, const std::string& out) {
  const Scenario sc = load_scenario(scenario_path);
  const World world = build_world(sc);
  RenderInput in{&world.raw, read_points_csv(guide), read_points_csv(phi_s), read_points_csv(phi_f),
                 sc.start.pos, sc.goal};
  write_text_file(out, render_svg(in));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ESDF-free B-spline local planner"};
  app.require_subcommand(1);

  std::string scenario, out_dir = "out", out_file, algos = "dijkstra,astar,bidirectional";
  std::string guide, phi_s, phi_f, corrupt;
  SimOptions sim;
  std::uint64_t seed = 0;
  int instances = 100;
  bool no_time = false;

  auto* plan = app.add_subcommand("plan", "plan once and write trajectory, report and SVG");
  plan->add_option("scenario", scenario, "scenario JSON")->required();
  plan->add_option("--out", out_dir, "output directory")->capture_default_str();

  auto* simc = app.add_subcommand("simulate", "replanning run with limited sensing");
  simc->add_option("scenario", scenario, "scenario JSON")->required();
  simc->add_option("--sense", sim.sensing_radius, "sensing radius, m")->capture_default_str();
  simc->add_option("--period", sim.replan_period, "replan period, s")->capture_default_str();
  simc->add_option("--horizon", sim.horizon, "local target distance, m")->capture_default_str();
  simc->add_option("--timeout", sim.timeout, "simulated seconds; 0 picks from distance");
  simc->add_option("-o,--out", out_file, "write the executed path as CSV");

  auto* bench = app.add_subcommand("bench", "time grid searches over a suite");
  bench->add_option("suite", scenario, "suite JSON")->required();
  bench->add_option("--algos", algos, "comma-separated algorithms")->capture_default_str();
  bench->add_option("-o,--out", out_file, "metrics CSV path (stdout if omitted)");
  bench->add_flag("--no-time", no_time, "leave time_s empty so the CSV is reproducible");

  auto* grad = app.add_subcommand("gradcheck", "finite-difference gradient check");
  grad->add_option("--seed", seed, "RNG seed")->capture_default_str();
  grad->add_option("--instances", instances, "random instances per term")->capture_default_str();
  grad->add_option("--corrupt", corrupt, "perturb one term's gradient (negative control)")
      ->check(CLI::IsMember({"J_s", "J_c", "J_d", "J_f", "total"}));

  auto* render = app.add_subcommand("render", "SVG from saved artifacts");
  render->add_option("scenario", scenario, "scenario JSON")->required();
  render->add_option("guide", guide, "guide CSV")->required();
  render->add_option("phi_s", phi_s, "phi_s CSV")->required();
  render->add_option("phi_f", phi_f, "phi_f CSV")->required();
  render->add_option("-o,--out", out_file, "SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalidInput;
  }

  try {
    if (*plan) return cmd_plan(scenario, out_dir);
    if (*simc) return cmd_simulate(scenario, sim, out_file);
    if (*bench) return cmd_bench(scenario, algos, out_file, no_time);
    if (*grad) return cmd_gradcheck(seed, instances, corrupt);
    if (*render) return cmd_render(scenario, guide, phi_s, phi_f, out_file);
  } catch (const NoPathError& e) {
    std::cerr << "no path: " << e.what() << "\n";
    return kExitPlanningFailure;
  } catch (const PlanningFailed& e) {
    std::cerr << "planning failed at " << e.stage() << ": " << e.what() << "\n";
    return kExitPlanningFailure;
  } catch (const Error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitInvalidInput;
  }
  return 0;
}
