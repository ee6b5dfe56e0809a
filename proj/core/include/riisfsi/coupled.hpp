#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "riisfsi/config.hpp"
#include "riisfsi/errors.hpp"
#include "riisfsi/fluid.hpp"
#include "riisfsi/linear_solver.hpp"
#include "riisfsi/mesh.hpp"
#include "riisfsi/riis.hpp"
#include "riisfsi/solid.hpp"

namespace riisfsi {

/// Time level n of the coupled problem.
struct FsiState {
  double time = 0.0;
  int step = 0;
  NodalField u;        // fluid velocity
  NodalField p;        // fluid pressure
  NodalField d;        // solid displacement d^n
  NodalField d_prev;   // d^{n-1}
  NodalField d_ale;    // fluid-domain displacement d_ALE^n
  NodalField u_ale;    // domain velocity of the step that produced level n
  std::vector<ValveSurface> valves;
  std::vector<ValveForces> forces;     // F_k, V_k consumed by the step to level n
  std::vector<double> pressure_jump;   // p_down - p_up at level n, per valve

  /// Valve data of the fluid solve that produced level n; the next step
  /// integrates the resistive term with them to obtain F_k.
  std::vector<Polyline> valve_geometry;
  std::vector<DeltaSupport> fluid_support;
  std::vector<double> resistive_coefficient;
};

struct StepTimings {
  double total = 0.0;
  double linear_solve = 0.0;
  double fluid_assembly = 0.0;
  double solid_assembly = 0.0;
  double compute_g = 0.0;
  double mesh_motion = 0.0;
};

struct StepReport {
  int step = 0;
  double time = 0.0;
  int newton_iterations = 0;
  std::vector<double> residual_history;
  StepTimings timings;
  std::vector<ValveForces> forces;
  std::vector<double> blend;
  /// Resultant of the assembled attachment load and sum of F_k.
  Eigen::Vector2d attachment_resultant = Eigen::Vector2d::Zero();
  Eigen::Vector2d force_total = Eigen::Vector2d::Zero();
  /// Torque about the center of mass of the attachment load minus that of
  /// the resistive force it balances.
  double residual_torque = 0.0;
  double divergence = 0.0;  // integral of div u over the fluid
  double interface_velocity_mismatch = 0.0;  // max |u - (d - d^n)/dt| on the interface
};

/// Static data and cached operators of one coupled run.
class FsiSolver {
 public:
  explicit FsiSolver(SimConfig config);
  ~FsiSolver();
  FsiSolver(FsiSolver&&) noexcept;
  FsiSolver& operator=(FsiSolver&&) noexcept;

  const SimConfig& config() const;
  const MeshPair& meshes() const;
  const Eigen::MatrixXd& fibers() const;

  /// Rest state at t = 0 (d^{-1} = d^0 = 0).
  FsiState initial_state() const;

  /// One geometrically explicit monolithic step. `state` is replaced by the
  /// new level only on success.
  StepReport step(FsiState& state);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Free-function form of FsiSolver::step.
std::pair<FsiState, StepReport> fsi_step(FsiSolver& solver, const FsiState& state);

/// Builds the fluid/solid meshes of a scenario.
MeshPair scenario_meshes(const GeometryConfig& geometry);

struct DiagnosticsRow {
  double time = 0.0;
  Eigen::Vector2d center_of_mass = Eigen::Vector2d::Zero();
  double vertical_velocity = 0.0;
  double pressure_jump = 0.0;  // first valve, 0 without valves
  std::vector<Eigen::Vector2d> force;
  std::vector<double> volume;
  std::vector<double> force_density;
  double residual_torque = 0.0;
  // Auxiliary observables.
  double lower_chamber_area = 0.0;
  double max_velocity = 0.0;
};

struct Trajectory {
  std::vector<std::string> valve_names;
  std::vector<DiagnosticsRow> rows;
  std::vector<StepReport> reports;
  DiagnosticsRow initial;
  bool failed = false;
  ErrorCategory failure_category = ErrorCategory::parameter;
  std::string failure;
  double wall_seconds = 0.0;
};

struct RunCallbacks {
  /// Called with the initial state (step 0) and after every step.
  std::function<void(const FsiSolver&, const FsiState&)> on_state;
};

/// Runs from rest to the final time. Step errors end the run; the partial
/// trajectory is returned with the failure recorded.
Trajectory run_simulation(const SimConfig& config, const RunCallbacks& callbacks = {});

}  // namespace riisfsi
