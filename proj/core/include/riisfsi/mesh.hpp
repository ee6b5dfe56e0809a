#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "riisfsi/nodal_field.hpp"

namespace riisfsi {

enum class Region { fluid, solid };

const char* to_string(Region region);

/// Boundary facet node list, sorted ascending. Unused trailing slots are -1
/// (2D facets are edges and use two slots).
using Facet = std::array<int, 3>;

Facet make_facet(std::initializer_list<int> nodes);

struct TaggedFacet {
  Facet nodes;
  std::string tag;
};

namespace tags {
inline constexpr const char* interface = "interface";
inline constexpr const char* exterior = "exterior";
inline constexpr const char* inlet = "inlet";
inline constexpr const char* outlet = "outlet";
inline constexpr const char* wall = "wall";
}  // namespace tags

/// Simplicial mesh in reference coordinates [m].
struct Mesh {
  int dim = 2;
  Region region = Region::fluid;
  Eigen::MatrixXd nodes;  // num_nodes x dim
  Eigen::MatrixXi cells;  // num_cells x (dim + 1)
  std::vector<TaggedFacet> facets;

  int num_nodes() const { return static_cast<int>(nodes.rows()); }
  int num_cells() const { return static_cast<int>(cells.rows()); }
  int nodes_per_cell() const { return dim + 1; }

  /// Signed measure of a cell in reference coordinates.
  double cell_volume(int cell) const;
  double cell_volume(int cell, const Eigen::MatrixXd& coords) const;
  Eigen::VectorXd cell_centroid(int cell) const;

  /// Sorted, de-duplicated node indices lying on facets carrying `tag`.
  std::vector<int> nodes_with_tag(const std::string& tag) const;
  std::vector<Facet> facets_with_tag(const std::string& tag) const;
};

/// Facets belonging to exactly one cell, sorted.
std::vector<Facet> boundary_facets(const Mesh& mesh);

/// Pairs (fluid node, solid node) whose reference coordinates coincide on the
/// fluid-solid interface.
struct InterfaceMap {
  std::vector<std::pair<int, int>> pairs;
};

struct MeshPair {
  Mesh fluid;
  Mesh solid;
  InterfaceMap interface;
};

struct ValidationReport {
  bool pass = true;
  std::vector<int> inverted_fluid_cells;
  std::vector<int> inverted_solid_cells;
  std::vector<int> nonconforming_pairs;  // indices into InterfaceMap::pairs
  double max_interface_gap = 0.0;
  std::vector<std::string> messages;
};

/// Checks volume positivity, index ranges, tag completeness and interface
/// conformity. Never throws; failures are listed in the report.
ValidationReport validate(const MeshPair& pair, double conformity_tol = 1e-12);

/// Disc (fluid) inside an annulus (solid), conforming on the shared circle.
/// The triangulation is exactly mirror-symmetric about the vertical axis.
MeshPair generate_annulus_benchmark(double fluid_radius, double wall_thickness, double target_h);

/// Rectangular channel [0, length] x [0, height] with solid strips of
/// `wall_thickness` below and above.
MeshPair generate_channel_benchmark(double length, double height, double target_h,
                                    double wall_thickness);

/// Structured triangulation of [x0, x1] x [y0, y1] with nx x ny quads, each
/// split into two triangles. Boundary facets tagged `wall`.
Mesh generate_rectangle(double x0, double y0, double x1, double y1, int nx, int ny,
                        Region region = Region::fluid);

/// Unit circumferential tangent at `point` (2D analog of a fiber field tangent
/// to concentric shells). Throws ParameterError at the origin.
Eigen::Vector2d circumferential_fiber(const Eigen::Vector2d& point);

/// Fiber direction per cell, evaluated at the reference cell centroid.
Eigen::MatrixXd circumferential_fibers(const Mesh& mesh);

/// x_hat + displacement for every node; the mesh itself is not modified.
Eigen::MatrixXd current_coordinates(const Mesh& mesh, const NodalField& displacement);

/// Builds the interface map by coordinate matching of the `interface`-tagged
/// nodes of both meshes.
InterfaceMap match_interface(const Mesh& fluid, const Mesh& solid, double tol = 1e-12);

}  // namespace riisfsi
