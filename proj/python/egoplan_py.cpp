#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "egoplan/artifacts.hpp"
#include "egoplan/report.hpp"

namespace py = pybind11;
using namespace egoplan;

namespace {

std::string trajectory_csv(const UniformBspline& s) {
  std::ostringstream out;
  write_trajectory_csv(out, s);
  return out.str();
}

}  // namespace

PYBIND11_MODULE(egoplan, m) {
  m.doc() = "ESDF-free B-spline local planner: search, optimize, refine, simulate.";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidInput>(m, "InvalidInput", error.ptr());
  py::register_exception<IoError>(m, "IoError", error.ptr());
  py::register_exception<PreconditionError>(m, "PreconditionError", error.ptr());
  py::register_exception<NoPathError>(m, "NoPathError", error.ptr());
  py::register_exception<PlanningFailed>(m, "PlanningFailed", error.ptr());

  py::enum_<SearchAlgorithm>(m, "SearchAlgorithm")
      .value("dijkstra", SearchAlgorithm::kDijkstra)
      .value("astar", SearchAlgorithm::kAStar)
      .value("bidirectional", SearchAlgorithm::kBidirectional);

  py::class_<UniformBspline>(m, "UniformBspline")
      .def(py::init<std::vector<Vec3>, double>(), py::arg("ctrl"), py::arg("dt"))
      .def_property_readonly("ctrl", &UniformBspline::ctrl)
      .def_property_readonly("dt", &UniformBspline::dt)
      .def_property_readonly("duration", &UniformBspline::duration)
      .def("__call__", [](const UniformBspline& s, double t, int order) { return evaluate(s, t, order); },
           py::arg("t"), py::arg("order") = 0)
      .def("samples", [](const UniformBspline& s, int n) { return sample_positions(s, n); },
           py::arg("count") = 200)
      .def("trajectory_csv", &trajectory_csv);

  py::class_<PlannerConfig>(m, "PlannerConfig")
      .def(py::init<>())
      .def_readwrite("lambda_s", &PlannerConfig::lambda_s)
      .def_readwrite("lambda_c", &PlannerConfig::lambda_c)
      .def_readwrite("lambda_d", &PlannerConfig::lambda_d)
      .def_readwrite("lambda_f", &PlannerConfig::lambda_f)
      .def_readwrite("s_f", &PlannerConfig::s_f)
      .def_readwrite("v_m", &PlannerConfig::v_m)
      .def_readwrite("a_m", &PlannerConfig::a_m)
      .def_readwrite("j_m", &PlannerConfig::j_m);

  py::class_<Scenario>(m, "Scenario")
      .def_readwrite("seed", &Scenario::seed)
      .def_readwrite("resolution", &Scenario::resolution)
      .def_readwrite("goal", &Scenario::goal)
      .def_readwrite("config", &Scenario::config)
      .def_readwrite("algorithm", &Scenario::algorithm)
      .def_property(
          "start", [](const Scenario& s) { return s.start.pos; },
          [](Scenario& s, const Vec3& p) { s.start.pos = p; })
      .def("to_json", &scenario_to_json);

  m.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("base_dir") = std::filesystem::path{});
  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("forest_scenario", &forest_scenario, py::arg("seed"), py::arg("density") = 0.1);

  py::class_<PlanReport>(m, "PlanReport")
      .def_property_readonly("guide", [](const PlanReport& r) { return r.guide; })
      .def_readonly("phi_s", &PlanReport::phi_s)
      .def_readonly("phi_f", &PlanReport::phi_f)
      .def_property_readonly("cost_m", [](const PlanReport& r) { return r.search.cost; })
      .def_property_readonly("expanded", [](const PlanReport& r) { return r.search.expanded; })
      .def_readonly("anchor_rounds", &PlanReport::anchor_rounds)
      .def_readonly("anchor_clearance", &PlanReport::anchor_clearance)
      .def_readonly("clearance", &PlanReport::clearance)
      .def_readonly("exceed_ratio_before", &PlanReport::exceed_ratio_before)
      .def_readonly("exceed_ratio_after", &PlanReport::exceed_ratio_after)
      .def_readonly("refine_warning", &PlanReport::refine_warning)
      .def("to_json", &plan_report_json);

  m.def("plan_once", py::overload_cast<const Scenario&>(&plan_once), py::arg("scenario"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<SimOptions>(m, "SimOptions")
      .def(py::init<>())
      .def_readwrite("sensing_radius", &SimOptions::sensing_radius)
      .def_readwrite("replan_period", &SimOptions::replan_period)
      .def_readwrite("horizon", &SimOptions::horizon)
      .def_readwrite("timeout", &SimOptions::timeout);

  py::class_<SimReport>(m, "SimReport")
      .def_readonly("success", &SimReport::success)
      .def_readonly("collision", &SimReport::collision)
      .def_readonly("timed_out", &SimReport::timed_out)
      .def_readonly("plans", &SimReport::plans)
      .def_readonly("replans", &SimReport::replans)
      .def_readonly("path_length", &SimReport::path_length)
      .def_readonly("time", &SimReport::time)
      .def_readonly("positions", &SimReport::positions);

  m.def("simulate", py::overload_cast<const Scenario&, const SimOptions&>(&simulate),
        py::arg("scenario"), py::arg("options") = SimOptions{},
        py::call_guard<py::gil_scoped_release>());

  m.def(
      "gradcheck",
      [](std::uint64_t seed, int instances) {
        py::dict out;
        for (const auto& t : run_gradcheck(seed, instances).terms) out[py::str(t.name)] = t.max_rel_error;
        return out;
      },
      py::arg("seed") = 0, py::arg("instances") = 100);

  m.def("exceed_ratio", &exceed_ratio);
  m.def("reallocate", &reallocate);
  m.def("yaw_from_velocity", &yaw_from_velocity, py::arg("spline"), py::arg("t"), py::arg("held") = 0.0);
}
