#pragma once

namespace egoplan {

struct SolverSettings {
  int max_iterations = 200;
  double grad_tolerance = 1e-4;   ///< stop when the gradient max-norm falls below this
  double objective_tolerance = 1e-6;  ///< relative decrease over `stall_window` iterations
  int stall_window = 3;
  int memory = 8;                 ///< quasi-Newton correction pairs
  int max_anchor_rounds = 30;
  double penalty_growth = 10.0;        ///< lambda_c multiplier when anchored points stay too close
  double max_lambda_c = 1e12;
  double clearance_tolerance = 1e-3;   ///< accepted shortfall below s_f at anchor checks
};

/// Weights, clearance and dynamic limits shared by the optimizer and refinement.
struct PlannerConfig {
  double lambda_s = 1.0;
  double lambda_c = 10.0;
  double lambda_d = 1.0;
  double lambda_f = 5.0;
  double s_f = 0.3;  ///< safety clearance, meters
  double v_m = 2.0;
  double a_m = 3.0;
  double j_m = 4.0;
  double lambda_e = 0.95;   ///< feasibility penalty starts at lambda_e * limit
  double c_j_factor = 1.2;  ///< cubic-to-quadratic switch at c_j_factor * lambda_e * limit
  int max_anchors_per_point = 8;
  double anchor_dedup_deg = 10.0;
  SolverSettings solver;

  /// Throws PreconditionError when a field is out of its valid range.
  void validate() const;
};

/// Anisotropic fitting weights for the refit stage.
struct FitWeights {
  double w_a = 1.0;   ///< axial (along-tangent) displacement
  double w_r = 10.0;  ///< radial displacement
  int samples = 0;    ///< <= 0 means 2 * N_c

  void validate() const;
};

}  // namespace egoplan
