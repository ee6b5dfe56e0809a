#include "riisfsi/coupled.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "riisfsi/diagnostics.hpp"

namespace riisfsi {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// u - u_ale interpolated at a support point.
Eigen::Vector2d slip(const Mesh& fluid, const DeltaSupport::Point& pt, const NodalField& u,
                     const NodalField& u_ale) {
  Eigen::Vector2d w = Eigen::Vector2d::Zero();
  for (int a = 0; a < 3; ++a) {
    const int n = fluid.cells(pt.cell, a);
    w += pt.shape(a) * (u.values.row(n) - u_ale.values.row(n)).transpose();
  }
  return w;
}

}  // namespace

MeshPair scenario_meshes(const GeometryConfig& g) {
  if (g.scenario == "annulus")
    return generate_annulus_benchmark(g.fluid_radius, g.wall_thickness, g.mesh_size);
  if (g.scenario == "channel")
    return generate_channel_benchmark(g.channel_length, g.channel_height, g.mesh_size,
                                      g.wall_thickness);
  throw ParameterError("unknown scenario '" + g.scenario + "'");
}

struct FsiSolver::Impl {
  SimConfig config;
  MeshPair meshes;
  Eigen::MatrixXd fibers;
  std::unique_ptr<MeshMotion> motion;
  std::vector<ValveSurface> valves;
  std::vector<SurfaceEmbedding> embeddings;
  std::vector<double> embedded_blend;

  DofMap dofs;
  int uf = -1, pf = -1, df = -1;
  std::vector<char> interface_fluid;  // fluid node -> linked to the solid
  std::unique_ptr<Assembler> assembler;
  LinearSolver solver;

  const SurfaceEmbedding& embedding(std::size_t k, const ValveSurface& v) {
    if (!(embedded_blend[k] == v.controller.blend)) {
      embeddings[k] = embed_surface(v.reference_geometry(), meshes);
      embedded_blend[k] = v.controller.blend;
    }
    return embeddings[k];
  }
};

FsiSolver::FsiSolver(SimConfig config) : impl_(std::make_unique<Impl>()) {
  Impl& m = *impl_;
  check_config(config);
  m.config = std::move(config);
  m.meshes = scenario_meshes(m.config.geometry);
  if (m.config.solid.active_max > 0.0) m.fibers = circumferential_fibers(m.meshes.solid);
  m.motion = std::make_unique<MeshMotion>(m.meshes);
  m.valves = resolve_valves(m.config);
  m.embeddings.resize(m.valves.size());
  m.embedded_blend.assign(m.valves.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < m.valves.size(); ++k) m.embedding(k, m.valves[k]);

  const int nf = m.meshes.fluid.num_nodes(), ns = m.meshes.solid.num_nodes();
  m.uf = m.dofs.add_field("u", nf, 2);
  m.pf = m.dofs.add_field("p", nf, 1);
  m.df = m.dofs.add_field("d", ns, 2);
  if (m.config.clamp_exterior)
    for (int n : m.meshes.solid.nodes_with_tag(tags::exterior))
      for (int i = 0; i < 2; ++i) m.dofs.constrain(m.df, n, i);
  m.interface_fluid.assign(nf, 0);
  for (const auto& [f, s] : m.meshes.interface.pairs) {
    m.interface_fluid[f] = 1;
    for (int i = 0; i < 2; ++i) m.dofs.link(m.uf, f, i, m.df, s, i, 1.0 / m.config.dt);
  }
  m.dofs.finalize();
}

FsiSolver::~FsiSolver() = default;
FsiSolver::FsiSolver(FsiSolver&&) noexcept = default;
FsiSolver& FsiSolver::operator=(FsiSolver&&) noexcept = default;

const SimConfig& FsiSolver::config() const { return impl_->config; }
const MeshPair& FsiSolver::meshes() const { return impl_->meshes; }
const Eigen::MatrixXd& FsiSolver::fibers() const { return impl_->fibers; }

FsiState FsiSolver::initial_state() const {
  const Impl& m = *impl_;
  const int nf = m.meshes.fluid.num_nodes(), ns = m.meshes.solid.num_nodes();
  FsiState s;
  s.u = NodalField(nf, 2);
  s.p = NodalField(nf, 1);
  s.d = NodalField(ns, 2);
  s.d_prev = NodalField(ns, 2);
  s.d_ale = NodalField(nf, 2);
  s.u_ale = NodalField(nf, 2);
  s.valves = m.valves;
  s.forces.assign(m.valves.size(), ValveForces{});
  s.pressure_jump.assign(m.valves.size(), 0.0);
  for (std::size_t k = 0; k < m.valves.size(); ++k)
    s.valve_geometry.push_back(displaced_surface(m.embeddings[k], m.meshes, s.d_ale, s.d));
  return s;
}

StepReport FsiSolver::step(FsiState& state) {
  Impl& m = *impl_;
  const auto t_start = Clock::now();
  const SimConfig& cfg = m.config;
  const Mesh& fluid = m.meshes.fluid;
  const Mesh& solid = m.meshes.solid;
  const double dt = cfg.dt;
  const std::size_t nv = state.valves.size();
  const DeltaQuadratureOptions dq{4, cfg.delta_subdivision};

  StepReport report;
  report.step = state.step + 1;
  report.time = state.time + dt;

  // Mesh motion and domain velocity.
  auto t0 = Clock::now();
  const NodalField d_ale = m.motion->extend(state.d);
  const NodalField u_ale = domain_velocity(d_ale, state.d_ale, dt);
  const Eigen::MatrixXd fluid_x = current_coordinates(fluid, d_ale);
  report.timings.mesh_motion = seconds_since(t0);

  // Controller with the level-n pressure jump.
  std::vector<ValveSurface> valves = state.valves;
  for (std::size_t k = 0; k < nv; ++k)
    valves[k].controller = controller_step(valves[k], state.pressure_jump[k], report.time, dt);

  // Valve forces from level-n fields and the attachment load.
  t0 = Clock::now();
  std::vector<Polyline> geometry(nv);
  std::vector<ValveForces> forces(nv);
  std::vector<DeltaSupport> solid_support(nv);
  std::vector<const DeltaSupport*> solid_support_ptr(nv);
  const Eigen::MatrixXd solid_x = current_coordinates(solid, state.d);
  const Eigen::Vector2d com =
      center_of_mass(m.meshes, fluid_configuration(m.meshes, state.d_ale, state.d), solid_x,
                     cfg.fluid.density, cfg.solid.density);
  double torque = 0.0;
  for (std::size_t k = 0; k < nv; ++k) {
    geometry[k] = displaced_surface(m.embedding(k, valves[k]), m.meshes, d_ale, state.d);
    Eigen::Vector2d f = Eigen::Vector2d::Zero();
    if (!state.fluid_support.empty()) {
      for (const auto& pt : state.fluid_support[k].points) {
        const Eigen::Vector2d r = state.resistive_coefficient[k] * pt.weight *
                                  slip(fluid, pt, state.u, state.u_ale);
        f += r;
        torque -= cross(pt.x - com, r);
      }
    }
    forces[k].force = f;
    solid_support[k] = delta_support(solid, solid_x, geometry[k], valves[k].half_thickness, dq);
    solid_support_ptr[k] = &solid_support[k];
    forces[k].volume = valve_volume(valves[k], solid_support[k], cfg.v_min);
    report.force_total += f;
    if (cfg.attachment_force)
      for (const auto& pt : solid_support[k].points)
        torque += cross(pt.x - com, pt.weight * forces[k].density());
  }
  const NodalField load = attachment_rhs(forces, solid_support_ptr, solid, cfg.attachment_force);
  report.attachment_resultant = load.values.colwise().sum().transpose();
  report.residual_torque = torque;
  report.timings.compute_g = seconds_since(t0);

  // Operators on the frozen new geometry.
  t0 = Clock::now();
  std::vector<DeltaSupport> fluid_support(nv);
  std::vector<double> coefficient(nv);
  FluidStepInput fin;
  fin.coords = fluid_x;
  fin.u_old = state.u;
  fin.u_ale = u_ale;
  fin.dt = dt;
  for (std::size_t k = 0; k < nv; ++k) {
    fluid_support[k] = delta_support(fluid, fluid_x, geometry[k], valves[k].half_thickness, dq);
    coefficient[k] = valves[k].effective_resistance() / valves[k].half_thickness;
  }
  for (std::size_t k = 0; k < nv; ++k) fin.valves.push_back({&fluid_support[k], coefficient[k]});
  if (cfg.geometry.scenario == "channel") {
    fin.tractions.push_back({tags::inlet, cfg.inlet_pressure});
    fin.tractions.push_back({tags::outlet, cfg.outlet_pressure});
  }
  const FluidOperator fop(fluid, cfg.fluid, std::move(fin));
  report.timings.fluid_assembly = seconds_since(t0);

  t0 = Clock::now();
  SolidStepInput sin;
  sin.d_old = state.d;
  sin.d_older = state.d_prev;
  sin.dt = dt;
  sin.time = report.time;
  sin.fibers = m.fibers;
  sin.load = load;
  const SolidOperator sop(solid, cfg.solid, std::move(sin));
  if (!m.assembler) {
    m.assembler = std::make_unique<Assembler>(
        m.dofs.num_dofs(),
        std::vector<ElementGroup>{fop.cell_group(m.dofs, m.uf, m.pf), fop.traction_group(m.dofs, m.uf),
                                  sop.cell_group(m.dofs, m.df), sop.load_group(m.dofs, m.df)});
  }
  report.timings.solid_assembly = seconds_since(t0);

  // Monolithic Newton solve.
  const int nf = fluid.num_nodes(), ns = solid.num_nodes();
  NodalField u(nf, 2), p(nf, 1), d(ns, 2);
  auto unpack = [&](const Eigen::VectorXd& x) {
    for (int n = 0; n < ns; ++n)
      for (int i = 0; i < 2; ++i) {
        const DofRef r = m.dofs(m.df, n, i);
        d(n, i) = r.index >= 0 ? x(r.index) : 0.0;
      }
    for (int n = 0; n < nf; ++n) {
      for (int i = 0; i < 2; ++i)
        if (!m.interface_fluid[n]) u(n, i) = x(m.dofs(m.uf, n, i).index);
      p(n, 0) = x(m.dofs(m.pf, n, 0).index);
    }
    for (const auto& [f, s] : m.meshes.interface.pairs)
      for (int i = 0; i < 2; ++i) u(f, i) = (d(s, i) - state.d(s, i)) / dt;
  };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m.dofs.num_dofs());
  for (int n = 0; n < ns; ++n)
    for (int i = 0; i < 2; ++i) {
      const DofRef r = m.dofs(m.df, n, i);
      if (r.index >= 0) x(r.index) = 2.0 * state.d(n, i) - state.d_prev(n, i);
    }
  for (int n = 0; n < nf; ++n) {
    for (int i = 0; i < 2; ++i)
      if (!m.interface_fluid[n]) x(m.dofs(m.uf, n, i).index) = state.u(n, i);
    x(m.dofs(m.pf, n, 0).index) = state.p(n, 0);
  }

  const std::vector<LocalKernel> kernels{fop.cell_kernel(u, p), fop.traction_kernel(),
                                         sop.cell_kernel(d), sop.load_kernel()};
  m.assembler->reset_timers();
  const SystemFunction fn = [&](const Eigen::VectorXd& xv, SparseSystem& system, bool jac) {
    unpack(xv);
    m.assembler->assemble_into(kernels, system, jac);
  };
  const NewtonReport nr = newton_solve(fn, x, cfg.newton, m.solver);
  unpack(x);
  const auto& gs = m.assembler->group_seconds();
  report.timings.fluid_assembly += gs[0] + gs[1];
  report.timings.solid_assembly += gs[2] + gs[3];
  report.timings.linear_solve = nr.linear_solve_seconds;
  report.newton_iterations = nr.iterations;
  report.residual_history = nr.residual_history;

  if (!u.all_finite() || !p.all_finite() || !d.all_finite())
    throw NonconvergenceError("coupled step produced non-finite fields", nr.residual_history);
  for (const auto& [f, s] : m.meshes.interface.pairs)
    report.interface_velocity_mismatch =
        std::max(report.interface_velocity_mismatch,
                 (u.values.row(f) - (d.values.row(s) - state.d.values.row(s)) / dt).norm());
  report.divergence = total_divergence(fluid, fluid_x, u);

  // Pressure jump at the new level.
  std::vector<double> jump(nv);
  for (std::size_t k = 0; k < nv; ++k) {
    try {
      jump[k] = chamber_pressure_jump(fluid, fluid_x, p, geometry[k], valves[k].half_thickness,
                                      valves[k].downstream_side);
    } catch (const ParameterError&) {
      if (valves[k].mode == ValveMode::pressure_driven) throw;
      jump[k] = std::numeric_limits<double>::quiet_NaN();
    }
  }

  for (const auto& v : valves) report.blend.push_back(v.controller.blend);
  report.forces = forces;

  FsiState next;
  next.time = report.time;
  next.step = report.step;
  next.u = std::move(u);
  next.p = std::move(p);
  next.d_prev = state.d;
  next.d = std::move(d);
  next.d_ale = d_ale;
  next.u_ale = u_ale;
  next.valves = std::move(valves);
  next.forces = std::move(forces);
  next.pressure_jump = std::move(jump);
  next.valve_geometry = std::move(geometry);
  next.fluid_support = std::move(fluid_support);
  next.resistive_coefficient = std::move(coefficient);
  state = std::move(next);
  report.timings.total = seconds_since(t_start);
  return report;
}

std::pair<FsiState, StepReport> fsi_step(FsiSolver& solver, const FsiState& state) {
  FsiState next = state;
  StepReport r = solver.step(next);
  return {std::move(next), std::move(r)};
}

namespace {

DiagnosticsRow make_row(const FsiSolver& solver, const FsiState& state) {
  const MeshPair& meshes = solver.meshes();
  const SimConfig& cfg = solver.config();
  DiagnosticsRow row;
  row.time = state.time;
  const Eigen::MatrixXd fx = fluid_configuration(meshes, state.d_ale, state.d);
  row.center_of_mass = center_of_mass(meshes, fx, current_coordinates(meshes.solid, state.d),
                                      cfg.fluid.density, cfg.solid.density);
  row.pressure_jump = state.pressure_jump.empty() ? 0.0 : state.pressure_jump.front();
  for (const auto& f : state.forces) {
    row.force.push_back(f.force);
    row.volume.push_back(f.volume);
    row.force_density.push_back(f.volume > 0.0 ? f.density().norm() : 0.0);
  }
  row.lower_chamber_area = lower_region_area(meshes.fluid, fx);
  row.max_velocity = state.u.values.size() ? state.u.values.cwiseAbs().maxCoeff() : 0.0;
  return row;
}

}  // namespace

Trajectory run_simulation(const SimConfig& config, const RunCallbacks& callbacks) {
  const auto t_start = Clock::now();
  Trajectory traj;
  FsiSolver solver(config);
  FsiState state = solver.initial_state();
  for (const auto& v : state.valves) traj.valve_names.push_back(v.name);
  traj.initial = make_row(solver, state);
  if (callbacks.on_state) callbacks.on_state(solver, state);

  const int steps =
      config.final_time > 0.0 ? static_cast<int>(std::ceil(config.final_time / config.dt - 1e-9)) : 0;
  Eigen::Vector2d prev_com = traj.initial.center_of_mass;
  for (int s = 1; s <= steps; ++s) {
    StepReport report;
    try {
      report = solver.step(state);
    } catch (const Error& e) {
      traj.failed = true;
      traj.failure_category = e.category();
      traj.failure = e.what();
      break;
    }
    DiagnosticsRow row = make_row(solver, state);
    row.vertical_velocity = (row.center_of_mass.y() - prev_com.y()) / config.dt;
    row.residual_torque = report.residual_torque;
    prev_com = row.center_of_mass;
    traj.reports.push_back(std::move(report));
    if (s % config.diagnostic_every == 0 || s == steps) traj.rows.push_back(std::move(row));
    if (callbacks.on_state) callbacks.on_state(solver, state);
  }
  traj.wall_seconds = seconds_since(t_start);
  return traj;
}

}  // namespace riisfsi
