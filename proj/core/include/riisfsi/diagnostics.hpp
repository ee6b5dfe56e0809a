#pragma once

#include <Eigen/Core>

#include "riisfsi/coupled.hpp"
#include "riisfsi/mesh.hpp"
#include "riisfsi/nodal_field.hpp"
#include "riisfsi/riis.hpp"

namespace riisfsi {

/// Fluid node positions bounded by the current solid: x_hat + d_ALE, except
/// interface nodes, which follow the solid displacement.
Eigen::MatrixXd fluid_configuration(const MeshPair& meshes, const NodalField& d_ale,
                                    const NodalField& d);

/// Mass-weighted centroid of both deformed domains (valves are massless).
Eigen::Vector2d center_of_mass(const MeshPair& meshes, const Eigen::MatrixXd& fluid_coords,
                               const Eigen::MatrixXd& solid_coords, double rho_f, double rho_s);
Eigen::Vector2d center_of_mass(const FsiState& state, const MeshPair& meshes, double rho_f,
                               double rho_s);

/// Area-averaged pressure on the downstream side minus the upstream side.
/// Cells whose centroid lies within eps of the surface are excluded. Throws
/// ParameterError if a side is empty.
double chamber_pressure_jump(const Mesh& fluid, const Eigen::MatrixXd& coords, const NodalField& p,
                             const Polyline& surface, double eps, int downstream_side);
double chamber_pressure_jump(const FsiState& state, const MeshPair& meshes, int valve);

/// Current area of the fluid cells' parts whose reference position lies
/// below y_hat = cut.
double lower_region_area(const Mesh& fluid, const Eigen::MatrixXd& coords, double cut = 0.0);

}  // namespace riisfsi
