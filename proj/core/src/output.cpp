#include "riisfsi/output.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "riisfsi/errors.hpp"

namespace riisfsi {

namespace {

std::string iso_time(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
  out << '\n';
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::ofstream open_file(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

void vtk_header(std::ostream& out, const std::string& title, const Eigen::MatrixXd& x,
                const Mesh& mesh) {
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << std::setprecision(17);
  out << "POINTS " << x.rows() << " double\n";
  for (Eigen::Index i = 0; i < x.rows(); ++i) out << x(i, 0) << ' ' << x(i, 1) << " 0\n";
  out << "CELLS " << mesh.num_cells() << ' ' << 4 * mesh.num_cells() << '\n';
  for (int c = 0; c < mesh.num_cells(); ++c)
    out << "3 " << mesh.cells(c, 0) << ' ' << mesh.cells(c, 1) << ' ' << mesh.cells(c, 2) << '\n';
  out << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (int c = 0; c < mesh.num_cells(); ++c) out << "5\n";
  out << "POINT_DATA " << x.rows() << '\n';
}

void vtk_vectors(std::ostream& out, const std::string& name, const Eigen::MatrixXd& v) {
  out << "VECTORS " << name << " double\n";
  for (Eigen::Index i = 0; i < v.rows(); ++i) out << v(i, 0) << ' ' << v(i, 1) << " 0\n";
}

}  // namespace

std::vector<std::string> diagnostics_columns(const std::vector<std::string>& valve_names) {
  std::vector<std::string> c{"t", "com_x", "com_y", "com_velocity_y", "pressure_jump"};
  for (const auto& n : valve_names) {
    c.push_back(n + "_force_x");
    c.push_back(n + "_force_y");
    c.push_back(n + "_volume");
    c.push_back(n + "_force_density");
  }
  c.insert(c.end(), {"residual_torque", "lower_chamber_area", "max_velocity"});
  return c;
}

std::vector<std::string> timings_columns() {
  return {"step",          "t",           "newton_iterations", "total",       "linear_solve",
          "fluid_assembly", "solid_assembly", "compute_g",     "mesh_motion", "final_residual"};
}

void write_diagnostics_csv(const Trajectory& trajectory, std::ostream& out) {
  write_row(out, diagnostics_columns(trajectory.valve_names));
  for (const auto& r : trajectory.rows) {
    std::vector<std::string> cells{num(r.time), num(r.center_of_mass.x()), num(r.center_of_mass.y()),
                                   num(r.vertical_velocity), num(r.pressure_jump)};
    for (std::size_t k = 0; k < trajectory.valve_names.size(); ++k) {
      cells.push_back(num(r.force[k].x()));
      cells.push_back(num(r.force[k].y()));
      cells.push_back(num(r.volume[k]));
      cells.push_back(num(r.force_density[k]));
    }
    cells.push_back(num(r.residual_torque));
    cells.push_back(num(r.lower_chamber_area));
    cells.push_back(num(r.max_velocity));
    write_row(out, cells);
  }
}

void write_timings_csv(const Trajectory& trajectory, std::ostream& out) {
  write_row(out, timings_columns());
  for (const auto& r : trajectory.reports) {
    const auto& t = r.timings;
    write_row(out, {std::to_string(r.step), num(r.time), std::to_string(r.newton_iterations),
                    num(t.total), num(t.linear_solve), num(t.fluid_assembly), num(t.solid_assembly),
                    num(t.compute_g), num(t.mesh_motion),
                    num(r.residual_history.empty() ? 0.0 : r.residual_history.back())});
  }
}

void write_fluid_vtk(const MeshPair& meshes, const FsiState& state, std::ostream& out) {
  const Eigen::MatrixXd x = current_coordinates(meshes.fluid, state.d_ale);
  vtk_header(out, "fluid t=" + num(state.time), x, meshes.fluid);
  vtk_vectors(out, "u", state.u.values);
  out << "SCALARS p double 1\nLOOKUP_TABLE default\n";
  for (int i = 0; i < state.p.num_nodes(); ++i) out << state.p(i, 0) << '\n';
  vtk_vectors(out, "d", state.d_ale.values);
}

void write_solid_vtk(const MeshPair& meshes, const FsiState& state, double dt, std::ostream& out) {
  const Eigen::MatrixXd x = current_coordinates(meshes.solid, state.d);
  vtk_header(out, "solid t=" + num(state.time), x, meshes.solid);
  vtk_vectors(out, "d", state.d.values);
  vtk_vectors(out, "u", (state.d.values - state.d_prev.values) / dt);
}

OutputWriter::OutputWriter(SimConfig config) : config_(std::move(config)) {}

std::string OutputWriter::path(const std::string& name) const {
  return (std::filesystem::path(config_.output_dir) / name).string();
}

void OutputWriter::begin() {
  started_ = std::chrono::system_clock::now();
  std::error_code ec;
  std::filesystem::create_directories(config_.output_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + config_.output_dir + "': " + ec.message());
  save_config(config_, path("config.json"));
  files_.push_back("config.json");
}

void OutputWriter::on_state(const FsiSolver& solver, const FsiState& state) {
  if (config_.snapshot_every <= 0 || state.step % config_.snapshot_every != 0) return;
  char name[64];
  std::snprintf(name, sizeof name, "fluid_%06d.vtk", state.step);
  {
    auto out = open_file(path(name));
    write_fluid_vtk(solver.meshes(), state, out);
  }
  files_.push_back(name);
  std::snprintf(name, sizeof name, "solid_%06d.vtk", state.step);
  {
    auto out = open_file(path(name));
    write_solid_vtk(solver.meshes(), state, config_.dt, out);
  }
  files_.push_back(name);
}

void OutputWriter::finish(const Trajectory& trajectory) {
  {
    auto out = open_file(path("diagnostics.csv"));
    write_diagnostics_csv(trajectory, out);
  }
  {
    auto out = open_file(path("timings.csv"));
    write_timings_csv(trajectory, out);
  }
  files_.push_back("diagnostics.csv");
  files_.push_back("timings.csv");

  nlohmann::json m;
  m["program"] = "riisfsi";
  m["config_digest"] = digest_hex(config_digest(config_));
  m["started_at"] = iso_time(started_);
  m["finished_at"] = iso_time(std::chrono::system_clock::now());
  m["status"] = trajectory.failed ? "failed" : "completed";
  if (trajectory.failed)
    m["failure"] = {{"category", to_string(trajectory.failure_category)},
                    {"message", trajectory.failure}};
  m["steps"] = trajectory.reports.size();
  m["final_time"] = trajectory.reports.empty() ? 0.0 : trajectory.reports.back().time;
  m["wall_seconds"] = trajectory.wall_seconds;
  m["files"] = files_;
  auto out = open_file(path("manifest.json"));
  out << m.dump(2) << '\n';
}

}  // namespace riisfsi
