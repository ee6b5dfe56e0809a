#include "riisfsi/diagnostics.hpp"

#include <cmath>

#include "riisfsi/errors.hpp"

namespace riisfsi {

Eigen::MatrixXd fluid_configuration(const MeshPair& meshes, const NodalField& d_ale,
                                    const NodalField& d) {
  Eigen::MatrixXd x = current_coordinates(meshes.fluid, d_ale);
  if (d.num_nodes() != meshes.solid.num_nodes())
    throw ShapeError("fluid configuration: solid displacement does not match the mesh");
  for (const auto& [f, s] : meshes.interface.pairs)
    x.row(f) = meshes.fluid.nodes.row(f) + d.values.row(s);
  return x;
}

Eigen::Vector2d center_of_mass(const MeshPair& meshes, const Eigen::MatrixXd& fluid_coords,
                               const Eigen::MatrixXd& solid_coords, double rho_f, double rho_s) {
  Eigen::Vector2d moment = Eigen::Vector2d::Zero();
  double mass = 0.0;
  auto add = [&](const Mesh& mesh, const Eigen::MatrixXd& x, double rho) {
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const Eigen::Vector2d a = x.row(mesh.cells(c, 0)).transpose();
      const Eigen::Vector2d b = x.row(mesh.cells(c, 1)).transpose();
      const Eigen::Vector2d e = x.row(mesh.cells(c, 2)).transpose();
      const double area = 0.5 * ((b - a).x() * (e - a).y() - (b - a).y() * (e - a).x());
      moment += rho * area * (a + b + e) / 3.0;
      mass += rho * area;
    }
  };
  add(meshes.fluid, fluid_coords, rho_f);
  add(meshes.solid, solid_coords, rho_s);
  return moment / mass;
}

Eigen::Vector2d center_of_mass(const FsiState& state, const MeshPair& meshes, double rho_f,
                               double rho_s) {
  return center_of_mass(meshes, fluid_configuration(meshes, state.d_ale, state.d),
                        current_coordinates(meshes.solid, state.d), rho_f, rho_s);
}

double chamber_pressure_jump(const Mesh& fluid, const Eigen::MatrixXd& coords, const NodalField& p,
                             const Polyline& surface, double eps, int downstream_side) {
  if (p.num_nodes() != fluid.num_nodes()) throw ShapeError("pressure jump: pressure does not match the mesh");
  double sum[2] = {0.0, 0.0}, area[2] = {0.0, 0.0};
  for (int c = 0; c < fluid.num_cells(); ++c) {
    Eigen::Vector2d centre = Eigen::Vector2d::Zero();
    double pm = 0.0;
    for (int a = 0; a < 3; ++a) {
      centre += coords.row(fluid.cells(c, a)).transpose() / 3.0;
      pm += p(fluid.cells(c, a), 0) / 3.0;
    }
    const SurfaceProjection proj = project_to_surface(surface, centre);
    if (proj.distance <= eps || proj.side == 0) continue;
    const int k = proj.side == downstream_side ? 0 : 1;
    const double vol = fluid.cell_volume(c, coords);
    sum[k] += vol * pm;
    area[k] += vol;
  }
  if (!(area[0] > 0.0) || !(area[1] > 0.0))
    throw ParameterError("pressure jump: the valve does not separate two chambers");
  return sum[0] / area[0] - sum[1] / area[1];
}

double chamber_pressure_jump(const FsiState& state, const MeshPair& meshes, int valve) {
  const ValveSurface& v = state.valves.at(static_cast<std::size_t>(valve));
  return chamber_pressure_jump(meshes.fluid, current_coordinates(meshes.fluid, state.d_ale), state.p,
                               state.valve_geometry.at(static_cast<std::size_t>(valve)),
                               v.half_thickness, v.downstream_side);
}

double lower_region_area(const Mesh& fluid, const Eigen::MatrixXd& coords, double cut) {
  double total = 0.0;
  for (int c = 0; c < fluid.num_cells(); ++c) {
    Eigen::Vector2d x[3];
    for (int a = 0; a < 3; ++a) x[a] = fluid.nodes.row(fluid.cells(c, a)).transpose();
    // Clip the reference triangle against y < cut (Sutherland-Hodgman, one edge).
    Eigen::Vector2d poly[4];
    int n = 0;
    for (int a = 0; a < 3; ++a) {
      const Eigen::Vector2d& p = x[a];
      const Eigen::Vector2d& q = x[(a + 1) % 3];
      const bool pin = p.y() < cut, qin = q.y() < cut;
      if (pin) poly[n++] = p;
      if (pin != qin) poly[n++] = p + (q - p) * ((cut - p.y()) / (q.y() - p.y()));
    }
    if (n < 3) continue;
    double clipped = 0.0;
    for (int k = 0; k < n; ++k) {
      const Eigen::Vector2d& p = poly[k];
      const Eigen::Vector2d& q = poly[(k + 1) % n];
      clipped += 0.5 * (p.x() * q.y() - q.x() * p.y());
    }
    total += std::abs(clipped) * fluid.cell_volume(c, coords) / fluid.cell_volume(c);
  }
  return total;
}

}  // namespace riisfsi
