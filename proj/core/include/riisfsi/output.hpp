#pragma once

#include <chrono>
#include <ostream>
#include <string>
#include <vector>

#include "riisfsi/config.hpp"
#include "riisfsi/coupled.hpp"

namespace riisfsi {

/// Column names of diagnostics.csv for the given valve names, in file order.
std::vector<std::string> diagnostics_columns(const std::vector<std::string>& valve_names);
std::vector<std::string> timings_columns();

void write_diagnostics_csv(const Trajectory& trajectory, std::ostream& out);
void write_timings_csv(const Trajectory& trajectory, std::ostream& out);

/// Legacy VTK unstructured grids of the deformed fluid (u, p, d_ALE) and
/// solid (d, velocity) meshes.
void write_fluid_vtk(const MeshPair& meshes, const FsiState& state, std::ostream& out);
void write_solid_vtk(const MeshPair& meshes, const FsiState& state, double dt, std::ostream& out);

/// Writes diagnostics.csv, timings.csv, optional VTK snapshots and
/// manifest.json into the output directory.
class OutputWriter {
 public:
  explicit OutputWriter(SimConfig config);

  /// Creates the output directory and records the start time.
  void begin();
  /// Writes snapshot files when the step matches the snapshot interval.
  void on_state(const FsiSolver& solver, const FsiState& state);
  /// Writes the CSV files and the manifest.
  void finish(const Trajectory& trajectory);

  const std::string& directory() const { return config_.output_dir; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::string path(const std::string& name) const;
  SimConfig config_;
  std::chrono::system_clock::time_point started_;
  std::vector<std::string> files_;
};

}  // namespace riisfsi
