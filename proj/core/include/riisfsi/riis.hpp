#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "riisfsi/mesh.hpp"
#include "riisfsi/nodal_field.hpp"

namespace riisfsi {

/// Cosine bump of unit mass supported on [-eps, eps]:
/// (1 + cos(pi y / eps)) / (2 eps) for |y| <= eps, 0 otherwise.
/// Throws ParameterError for eps <= 0.
double smoothed_delta(double y, double eps);

/// Open polyline in the current configuration (2D valve surface).
struct Polyline {
  std::vector<Eigen::Vector2d> points;

  int num_segments() const { return static_cast<int>(points.size()) - 1; }
  double length() const;
};

/// Closest-point query result against a polyline.
struct SurfaceProjection {
  double distance = 0.0;
  int segment = -1;
  /// +1 if the point lies on the left of the closest segment (direction from
  /// point k to k+1), -1 on the right, 0 on the surface.
  int side = 0;
  Eigen::Vector2d closest = Eigen::Vector2d::Zero();
};

/// Unsigned Euclidean distance from `x` to the polyline; distance to an end
/// point beyond the ends. Throws ParameterError for zero-length segments.
SurfaceProjection project_to_surface(const Polyline& surface, const Eigen::Vector2d& x);

enum class ValvePhase { closed, opening, open, closing };
const char* to_string(ValvePhase phase);

/// Opening/closing state. blend = 1 closed, 0 open.
struct ValveControllerState {
  ValvePhase phase = ValvePhase::closed;
  double blend = 1.0;
};

enum class ValveMode {
  fixed,           // blend never changes
  pressure_driven  // opens for a favorable pressure jump, closes for an adverse one
};

/// Immersed resistive surface with closed and open reference configurations of
/// identical topology.
struct ValveSurface {
  std::string name = "valve";
  std::vector<Eigen::Vector2d> closed_points;
  std::vector<Eigen::Vector2d> open_points;
  double half_thickness = 1.5e-3;  // [m]
  double resistance = 1e4;         // [kg m^-1 s^-1]
  double ramp_open = 10e-3;        // [s]
  double ramp_close = 35e-3;       // [s]
  ValveMode mode = ValveMode::fixed;
  /// Side (+1 left of the polyline direction, -1 right) counted as downstream
  /// when forming the pressure jump p_down - p_up.
  int downstream_side = -1;
  ValveControllerState controller;

  /// Linear blend of the closed and open polylines with the current blend.
  Polyline reference_geometry() const;
  /// Resistance scaled by the blend, i.e. R_k * blend.
  double effective_resistance() const { return resistance * controller.blend; }
};

/// Throws ParameterError if eps <= 0, R < 0, blend outside [0, 1] or the two
/// configurations have different vertex counts.
void check_valve(const ValveSurface& valve);

/// Straight valve from `a` to `b` resampled into `segments` equal pieces; the
/// open configuration equals the closed one unless set separately.
ValveSurface make_straight_valve(std::string name, const Eigen::Vector2d& a,
                                 const Eigen::Vector2d& b, int segments);

/// Distance function phi_k from the current valve configuration.
double surface_distance(const ValveSurface& valve, const Eigen::Vector2d& x,
                        const Polyline& current_config);

/// Resistive force density (R_k blend / eps_k) delta(phi_k(x)) (u - u_ale).
Eigen::Vector2d resistive_density(const ValveSurface& valve, const Eigen::Vector2d& u,
                                  const Eigen::Vector2d& u_ale, const Eigen::Vector2d& x,
                                  const Polyline& current_config);

/// Quadrature points of a mesh where a valve's smoothed delta is nonzero.
/// `weight` already includes the quadrature weight, the current cell measure
/// and delta(phi(x)), so sum(weight) is the weighted contact measure and
/// sum(weight * f(x)) approximates the delta-weighted integral of f.
struct DeltaSupport {
  struct Point {
    int cell;
    Eigen::Vector3d shape;  // P1 basis values at the point
    double weight;
    Eigen::Vector2d x;
  };
  std::vector<Point> points;
  std::vector<int> cell_begin;  // CSR-style offsets into points, size num_cells + 1

  double total_weight() const;
};

struct DeltaQuadratureOptions {
  int degree = 4;
  /// Each support cell is split uniformly into 4^subdivision triangles.
  int subdivision = 1;
};

/// Collects delta-weighted quadrature points over the cells of `mesh` placed at
/// `coords`, for the valve configuration `current_config`.
DeltaSupport delta_support(const Mesh& mesh, const Eigen::MatrixXd& coords,
                           const Polyline& current_config, double eps,
                           const DeltaQuadratureOptions& options = {});

/// Fluid force on the valve: integral over the current fluid domain of the
/// resistive density.
Eigen::Vector2d valve_force(const ValveSurface& valve, const Mesh& fluid,
                            const Eigen::MatrixXd& fluid_coords, const NodalField& u,
                            const NodalField& u_ale, const Polyline& current_config,
                            const DeltaQuadratureOptions& options = {});
Eigen::Vector2d valve_force(const ValveSurface& valve, const DeltaSupport& fluid_support,
                            const Mesh& fluid, const NodalField& u, const NodalField& u_ale);

/// Weighted contact measure V_k = int J delta(phi(x_hat + d)) dx_hat over the
/// solid. Throws AssumptionViolation when V_k < v_min.
double valve_volume(const ValveSurface& valve, const Mesh& solid, const NodalField& displacement,
                    const Polyline& current_config, double v_min = 1e-12,
                    const DeltaQuadratureOptions& options = {});
double valve_volume(const ValveSurface& valve, const DeltaSupport& solid_support, double v_min);

struct ValveForces {
  Eigen::Vector2d force = Eigen::Vector2d::Zero();  // F_k [N] (per unit depth in 2D)
  double volume = 0.0;                              // V_k
  Eigen::Vector2d density() const;                  // F_k / V_k
};

/// Attachment load density C_k delta(phi_k(x)) at the deformed solid point
/// `x_current`. Throws AssumptionViolation when V_k <= v_min.
Eigen::Vector2d attachment_density(const ValveForces& forces, const ValveSurface& valve,
                                   const Eigen::Vector2d& x_current,
                                   const Polyline& current_config, double v_min = 1e-12);

/// Advances the opening/closing state machine by one step using the pressure
/// jump dp = p_down - p_up. Fixed valves are returned unchanged.
ValveControllerState controller_step(const ValveSurface& valve, double dp, double t, double dt);

/// Location of reference valve vertices inside the fluid or solid mesh, used to
/// carry the surface along with the mesh displacement.
struct SurfaceEmbedding {
  struct Vertex {
    Region region;
    int cell;
    Eigen::Vector3d bary;
  };
  std::vector<Vertex> vertices;
  std::vector<Eigen::Vector2d> reference;
};

/// Throws ParameterError if a vertex lies outside both meshes.
SurfaceEmbedding embed_surface(const Polyline& reference, const MeshPair& meshes);

/// x_hat + displacement at each vertex: the fluid-domain displacement inside
/// the fluid mesh, the solid displacement inside the solid mesh.
Polyline displaced_surface(const SurfaceEmbedding& embedding, const MeshPair& meshes,
                           const NodalField& fluid_displacement,
                           const NodalField& solid_displacement);

}  // namespace riisfsi
