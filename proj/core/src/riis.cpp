#include "riisfsi/riis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "riisfsi/errors.hpp"
#include "riisfsi/kinematics.hpp"
#include "riisfsi/quadrature.hpp"

namespace riisfsi {

namespace {

inline double delta_unchecked(double y, double eps) {
  const double a = std::abs(y);
  if (a > eps) return 0.0;
  return (1.0 + std::cos(std::numbers::pi * a / eps)) / (2.0 * eps);
}

// Reference-triangle rule of the given degree applied on 4^s congruent subtriangles.
const QuadratureRule& subdivided_rule(int degree, int subdivision) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(degree, subdivision);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const QuadratureRule& base = triangle_rule(degree);
  const int n = 1 << subdivision;
  std::vector<std::array<Eigen::Vector2d, 3>> tris;
  const double s = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n - i; ++j) {
      Eigen::Vector2d p(i * s, j * s);
      tris.push_back({p, p + Eigen::Vector2d(s, 0), p + Eigen::Vector2d(0, s)});
      if (j < n - i - 1)
        tris.push_back({p + Eigen::Vector2d(s, 0), p + Eigen::Vector2d(s, s),
                        p + Eigen::Vector2d(0, s)});
    }
  }
  QuadratureRule rule;
  rule.dim = 2;
  rule.degree = degree;
  const int m = base.size();
  rule.points.resize(static_cast<Eigen::Index>(tris.size()) * m, 2);
  rule.weights.resize(static_cast<Eigen::Index>(tris.size()) * m);
  const double area_scale = s * s;
  int k = 0;
  for (const auto& t : tris) {
    // Orientation of the flipped subtriangles is irrelevant for positive weights.
    for (int q = 0; q < m; ++q, ++k) {
      const double xi = base.points(q, 0), eta = base.points(q, 1);
      rule.points.row(k) = (t[0] + xi * (t[1] - t[0]) + eta * (t[2] - t[0])).transpose();
      rule.weights(k) = base.weights(q) * area_scale;
    }
  }
  return cache.emplace(key, std::move(rule)).first->second;
}

Eigen::Vector3d barycentric(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                            const Eigen::Vector2d& c, const Eigen::Vector2d& p) {
  Eigen::Matrix2d m;
  m.col(0) = b - a;
  m.col(1) = c - a;
  const Eigen::Vector2d xi = m.inverse() * (p - a);
  return {1.0 - xi.sum(), xi(0), xi(1)};
}

}  // namespace

double smoothed_delta(double y, double eps) {
  if (!(eps > 0.0)) throw ParameterError("smoothed delta: half-thickness must be positive");
  return delta_unchecked(y, eps);
}

double Polyline::length() const {
  double l = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k) l += (points[k] - points[k - 1]).norm();
  return l;
}

SurfaceProjection project_to_surface(const Polyline& surface, const Eigen::Vector2d& x) {
  if (surface.points.size() < 2) throw ParameterError("valve surface needs at least two points");
  SurfaceProjection best;
  best.distance = std::numeric_limits<double>::infinity();
  for (int k = 0; k < surface.num_segments(); ++k) {
    const Eigen::Vector2d& a = surface.points[k];
    const Eigen::Vector2d& b = surface.points[k + 1];
    const Eigen::Vector2d e = b - a;
    const double ee = e.squaredNorm();
    if (!(ee > 0.0)) throw ParameterError("valve surface has a zero-length segment");
    const double t = std::clamp((x - a).dot(e) / ee, 0.0, 1.0);
    const Eigen::Vector2d c = a + t * e;
    const double d = (x - c).norm();
    if (d < best.distance) {
      best.distance = d;
      best.segment = k;
      best.closest = c;
      const double cross = e.x() * (x - a).y() - e.y() * (x - a).x();
      best.side = cross > 0.0 ? 1 : (cross < 0.0 ? -1 : 0);
    }
  }
  return best;
}

const char* to_string(ValvePhase phase) {
  switch (phase) {
    case ValvePhase::closed: return "closed";
    case ValvePhase::opening: return "opening";
    case ValvePhase::open: return "open";
    case ValvePhase::closing: return "closing";
  }
  return "unknown";
}

Polyline ValveSurface::reference_geometry() const {
  Polyline p;
  const double b = controller.blend;
  p.points.resize(closed_points.size());
  for (std::size_t k = 0; k < closed_points.size(); ++k)
    p.points[k] = b * closed_points[k] + (1.0 - b) * open_points[k];
  return p;
}

void check_valve(const ValveSurface& valve) {
  if (!(valve.half_thickness > 0.0))
    throw ParameterError("valve '" + valve.name + "': half-thickness must be positive");
  if (!(valve.resistance >= 0.0))
    throw ParameterError("valve '" + valve.name + "': resistance must be non-negative");
  if (!(valve.controller.blend >= 0.0 && valve.controller.blend <= 1.0))
    throw ParameterError("valve '" + valve.name + "': blend outside [0, 1]");
  if (valve.closed_points.size() < 2 || valve.closed_points.size() != valve.open_points.size())
    throw ParameterError("valve '" + valve.name +
                         "': open and closed configurations must share at least two vertices");
  if (!(valve.ramp_open > 0.0) || !(valve.ramp_close > 0.0))
    throw ParameterError("valve '" + valve.name + "': ramp times must be positive");
  if (valve.downstream_side != 1 && valve.downstream_side != -1)
    throw ParameterError("valve '" + valve.name + "': downstream side must be +1 or -1");
}

ValveSurface make_straight_valve(std::string name, const Eigen::Vector2d& a,
                                 const Eigen::Vector2d& b, int segments) {
  if (segments < 1) throw ParameterError("valve needs at least one segment");
  ValveSurface v;
  v.name = std::move(name);
  for (int k = 0; k <= segments; ++k)
    v.closed_points.push_back(a + (b - a) * (static_cast<double>(k) / segments));
  v.open_points = v.closed_points;
  return v;
}

double surface_distance(const ValveSurface&, const Eigen::Vector2d& x,
                        const Polyline& current_config) {
  return project_to_surface(current_config, x).distance;
}

Eigen::Vector2d resistive_density(const ValveSurface& valve, const Eigen::Vector2d& u,
                                  const Eigen::Vector2d& u_ale, const Eigen::Vector2d& x,
                                  const Polyline& current_config) {
  const double eps = valve.half_thickness;
  const double phi = surface_distance(valve, x, current_config);
  return valve.effective_resistance() / eps * smoothed_delta(phi, eps) * (u - u_ale);
}

double DeltaSupport::total_weight() const {
  double s = 0.0;
  for (const auto& p : points) s += p.weight;
  return s;
}

DeltaSupport delta_support(const Mesh& mesh, const Eigen::MatrixXd& coords,
                           const Polyline& current_config, double eps,
                           const DeltaQuadratureOptions& options) {
  if (mesh.dim != 2) throw ParameterError("delta support: only 2D meshes are supported");
  if (!(eps > 0.0)) throw ParameterError("delta support: half-thickness must be positive");
  if (options.subdivision < 0 || options.subdivision > 4)
    throw ParameterError("delta support: subdivision must be in [0, 4]");
  if (coords.rows() != mesh.num_nodes() || coords.cols() < 2)
    throw ShapeError("delta support: coordinate array does not match the mesh");
  if (current_config.points.size() < 2)
    throw ParameterError("valve surface needs at least two points");

  const QuadratureRule& rule = subdivided_rule(options.degree, options.subdivision);
  Eigen::Vector2d lo = current_config.points.front(), hi = lo;
  for (const auto& p : current_config.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }

  DeltaSupport out;
  out.cell_begin.assign(mesh.num_cells() + 1, 0);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    out.cell_begin[c] = static_cast<int>(out.points.size());
    const Simplex<2> s = cell_simplex<2>(mesh, coords, c);
    const Eigen::Vector2d centre = s.centroid();
    double radius = 0.0;
    for (int a = 0; a < 3; ++a) radius = std::max(radius, (s.x.row(a).transpose() - centre).norm());
    const double reach = eps + radius;
    if ((centre.array() < lo.array() - reach).any() || (centre.array() > hi.array() + reach).any())
      continue;
    if (project_to_surface(current_config, centre).distance > reach) continue;
    const double area = std::abs(s.measure) * 2.0;  // reference weights sum to 1/2
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d xi = rule.points.row(q).transpose();
      const Eigen::Vector2d x = s.map(xi);
      const double d = delta_unchecked(project_to_surface(current_config, x).distance, eps);
      if (d == 0.0) continue;
      out.points.push_back({c, Simplex<2>::shape(xi), rule.weights(q) * area * d, x});
    }
  }
  out.cell_begin[mesh.num_cells()] = static_cast<int>(out.points.size());
  return out;
}

Eigen::Vector2d valve_force(const ValveSurface& valve, const DeltaSupport& support,
                            const Mesh& fluid, const NodalField& u, const NodalField& u_ale) {
  if (u.num_nodes() != fluid.num_nodes() || u_ale.num_nodes() != fluid.num_nodes() ||
      u.components() != 2 || u_ale.components() != 2)
    throw ShapeError("valve force: velocity fields do not match the fluid mesh");
  const double coef = valve.effective_resistance() / valve.half_thickness;
  Eigen::Vector2d f = Eigen::Vector2d::Zero();
  for (const auto& p : support.points) {
    Eigen::Vector2d w = Eigen::Vector2d::Zero();
    for (int a = 0; a < 3; ++a) {
      const int node = fluid.cells(p.cell, a);
      w += p.shape(a) * (u.values.row(node) - u_ale.values.row(node)).transpose();
    }
    f += coef * p.weight * w;
  }
  return f;
}

Eigen::Vector2d valve_force(const ValveSurface& valve, const Mesh& fluid,
                            const Eigen::MatrixXd& fluid_coords, const NodalField& u,
                            const NodalField& u_ale, const Polyline& current_config,
                            const DeltaQuadratureOptions& options) {
  check_valve(valve);
  const DeltaSupport support =
      delta_support(fluid, fluid_coords, current_config, valve.half_thickness, options);
  return valve_force(valve, support, fluid, u, u_ale);
}

double valve_volume(const ValveSurface& valve, const DeltaSupport& solid_support, double v_min) {
  const double v = solid_support.total_weight();
  if (!(v >= v_min)) throw AssumptionViolation(valve.name, v, v_min);
  return v;
}

double valve_volume(const ValveSurface& valve, const Mesh& solid, const NodalField& displacement,
                    const Polyline& current_config, double v_min,
                    const DeltaQuadratureOptions& options) {
  check_valve(valve);
  const Eigen::MatrixXd x = current_coordinates(solid, displacement);
  for (int c = 0; c < solid.num_cells(); ++c) {
    const double vol = solid.cell_volume(c, x);
    if (!(vol > 0.0)) throw InvertedElementError(c, vol / solid.cell_volume(c));
  }
  return valve_volume(valve, delta_support(solid, x, current_config, valve.half_thickness, options),
                      v_min);
}

Eigen::Vector2d ValveForces::density() const { return force / volume; }

Eigen::Vector2d attachment_density(const ValveForces& forces, const ValveSurface& valve,
                                   const Eigen::Vector2d& x_current,
                                   const Polyline& current_config, double v_min) {
  if (!(forces.volume > v_min)) throw AssumptionViolation(valve.name, forces.volume, v_min);
  const double phi = surface_distance(valve, x_current, current_config);
  return forces.density() * smoothed_delta(phi, valve.half_thickness);
}

ValveControllerState controller_step(const ValveSurface& valve, double dp, double /*t*/,
                                     double dt) {
  ValveControllerState s = valve.controller;
  if (valve.mode == ValveMode::fixed) return s;
  if (!(dt > 0.0)) throw ParameterError("controller: time step must be positive");
  if (!std::isfinite(dp)) throw ParameterError("controller: pressure jump is not finite");

  if (dp > 0.0 && (s.phase == ValvePhase::open || s.phase == ValvePhase::opening))
    s.phase = ValvePhase::closing;
  else if (dp < 0.0 && (s.phase == ValvePhase::closed || s.phase == ValvePhase::closing))
    s.phase = ValvePhase::opening;

  constexpr double snap = 1e-12;
  if (s.phase == ValvePhase::opening) {
    s.blend -= dt / valve.ramp_open;
    if (s.blend <= snap) {
      s.blend = 0.0;
      s.phase = ValvePhase::open;
    }
  } else if (s.phase == ValvePhase::closing) {
    s.blend += dt / valve.ramp_close;
    if (s.blend >= 1.0 - snap) {
      s.blend = 1.0;
      s.phase = ValvePhase::closed;
    }
  }
  return s;
}

SurfaceEmbedding embed_surface(const Polyline& reference, const MeshPair& meshes) {
  SurfaceEmbedding e;
  e.reference = reference.points;
  for (const auto& p : reference.points) {
    bool found = false;
    for (const Mesh* mesh : {&meshes.fluid, &meshes.solid}) {
      double best = -std::numeric_limits<double>::infinity();
      SurfaceEmbedding::Vertex v{mesh->region, -1, Eigen::Vector3d::Zero()};
      for (int c = 0; c < mesh->num_cells(); ++c) {
        const Eigen::Vector2d a = mesh->nodes.row(mesh->cells(c, 0)).transpose();
        const Eigen::Vector2d b = mesh->nodes.row(mesh->cells(c, 1)).transpose();
        const Eigen::Vector2d d = mesh->nodes.row(mesh->cells(c, 2)).transpose();
        const Eigen::Vector2d lo = a.cwiseMin(b).cwiseMin(d), hi = a.cwiseMax(b).cwiseMax(d);
        if ((p.array() < lo.array() - 1e-12).any() || (p.array() > hi.array() + 1e-12).any())
          continue;
        const Eigen::Vector3d bary = barycentric(a, b, d, p);
        if (bary.minCoeff() > best) {
          best = bary.minCoeff();
          v.cell = c;
          v.bary = bary;
        }
      }
      if (v.cell >= 0 && best >= -1e-10) {
        e.vertices.push_back(v);
        found = true;
        break;
      }
    }
    if (!found) throw ParameterError("valve vertex lies outside the computational domain");
  }
  return e;
}

Polyline displaced_surface(const SurfaceEmbedding& embedding, const MeshPair& meshes,
                           const NodalField& fluid_displacement,
                           const NodalField& solid_displacement) {
  if (fluid_displacement.num_nodes() != meshes.fluid.num_nodes() ||
      solid_displacement.num_nodes() != meshes.solid.num_nodes())
    throw ShapeError("displaced surface: displacement fields do not match the meshes");
  Polyline out;
  out.points.reserve(embedding.vertices.size());
  for (std::size_t k = 0; k < embedding.vertices.size(); ++k) {
    const auto& v = embedding.vertices[k];
    const bool fluid = v.region == Region::fluid;
    const Mesh& mesh = fluid ? meshes.fluid : meshes.solid;
    const NodalField& d = fluid ? fluid_displacement : solid_displacement;
    Eigen::Vector2d x = embedding.reference[k];
    for (int a = 0; a < 3; ++a) x += v.bary(a) * d.values.row(mesh.cells(v.cell, a)).transpose();
    out.points.push_back(x);
  }
  return out;
}

}  // namespace riisfsi
