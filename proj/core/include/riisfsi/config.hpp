#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riisfsi/fluid.hpp"
#include "riisfsi/newton.hpp"
#include "riisfsi/riis.hpp"
#include "riisfsi/solid.hpp"

namespace riisfsi {

struct GeometryConfig {
  /// "annulus": fluid disc in a contracting annular wall, valve across the
  /// horizontal diameter. "channel": straight channel between clamped walls
  /// with a transverse valve at mid-length.
  std::string scenario = "annulus";
  double fluid_radius = 0.025;     // [m]
  double wall_thickness = 0.005;   // [m]
  double channel_length = 0.04;    // [m]
  double channel_height = 0.01;    // [m]
  double mesh_size = 1e-3;         // [m]
  /// Depth by which the scenario valve extends into the wall at both ends [m].
  double valve_penetration = 3e-3;
};

struct SimConfig {
  GeometryConfig geometry;
  FluidParams fluid;
  SolidParams solid;

  /// Add the valve defined by the scenario geometry, before `valves`.
  bool scenario_valve = true;
  /// Template for the scenario valve (geometry is overwritten).
  ValveSurface scenario_valve_params;
  std::vector<ValveSurface> valves;

  double dt = 5e-4;          // [s]
  double final_time = 0.25;  // [s]
  bool attachment_force = true;

  /// Channel only: traction pressures on the inlet and outlet [Pa].
  double inlet_pressure = 0.0;
  double outlet_pressure = 0.0;
  /// Clamp the solid exterior boundary (traction-free otherwise).
  bool clamp_exterior = false;

  double v_min = 1e-12;
  NewtonOptions newton;
  int delta_subdivision = 1;

  std::string output_dir = "output";
  int snapshot_every = 0;     // steps between VTK snapshots, 0 disables
  int diagnostic_every = 1;   // steps between diagnostic rows
  std::vector<double> convergence_dts{1e-3, 5e-4, 2.5e-4};
};

/// Defaults for "annulus" or "channel". Throws ParameterError otherwise.
SimConfig default_config(const std::string& scenario = "annulus");

/// Throws ParameterError on out-of-range values.
void check_config(const SimConfig& config);

/// Valves of the run: the scenario valve (if enabled) followed by `valves`.
std::vector<ValveSurface> resolve_valves(const SimConfig& config);

/// JSON text. Keys missing on input keep the defaults of the scenario named in
/// geometry.scenario; unknown keys are rejected.
std::string serialize(const SimConfig& config);
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);
void save_config(const SimConfig& config, const std::string& path);

/// 64-bit FNV-1a hash of the canonical serialization.
std::uint64_t config_digest(const SimConfig& config);
std::string digest_hex(std::uint64_t digest);

}  // namespace riisfsi
