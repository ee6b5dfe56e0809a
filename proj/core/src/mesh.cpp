#include "riisfsi/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <Eigen/LU>

#include "riisfsi/errors.hpp"

namespace riisfsi {

const char* to_string(Region region) { return region == Region::fluid ? "fluid" : "solid"; }

Facet make_facet(std::initializer_list<int> nodes) {
  Facet f{-1, -1, -1};
  std::size_t i = 0;
  for (int n : nodes) f[i++] = n;
  std::sort(f.begin(), f.begin() + static_cast<long>(i));
  return f;
}

double Mesh::cell_volume(int cell) const { return cell_volume(cell, nodes); }

double Mesh::cell_volume(int cell, const Eigen::MatrixXd& coords) const {
  const auto c = cells.row(cell);
  if (dim == 2) {
    const double ax = coords(c(1), 0) - coords(c(0), 0);
    const double ay = coords(c(1), 1) - coords(c(0), 1);
    const double bx = coords(c(2), 0) - coords(c(0), 0);
    const double by = coords(c(2), 1) - coords(c(0), 1);
    return 0.5 * (ax * by - ay * bx);
  }
  Eigen::Matrix3d m;
  for (int k = 0; k < 3; ++k) m.col(k) = (coords.row(c(k + 1)) - coords.row(c(0))).transpose();
  return m.determinant() / 6.0;
}

Eigen::VectorXd Mesh::cell_centroid(int cell) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  for (int a = 0; a < nodes_per_cell(); ++a) x += nodes.row(cells(cell, a)).transpose();
  return x / nodes_per_cell();
}

std::vector<int> Mesh::nodes_with_tag(const std::string& tag) const {
  std::set<int> out;
  for (const auto& f : facets) {
    if (f.tag != tag) continue;
    for (int n : f.nodes)
      if (n >= 0) out.insert(n);
  }
  return {out.begin(), out.end()};
}

std::vector<Facet> Mesh::facets_with_tag(const std::string& tag) const {
  std::vector<Facet> out;
  for (const auto& f : facets)
    if (f.tag == tag) out.push_back(f.nodes);
  return out;
}

namespace {

void cell_facets(const Mesh& mesh, int cell, std::vector<Facet>& out) {
  out.clear();
  const auto c = mesh.cells.row(cell);
  if (mesh.dim == 2) {
    out.push_back(make_facet({c(0), c(1)}));
    out.push_back(make_facet({c(1), c(2)}));
    out.push_back(make_facet({c(2), c(0)}));
  } else {
    out.push_back(make_facet({c(0), c(1), c(2)}));
    out.push_back(make_facet({c(0), c(1), c(3)}));
    out.push_back(make_facet({c(0), c(2), c(3)}));
    out.push_back(make_facet({c(1), c(2), c(3)}));
  }
}

}  // namespace

std::vector<Facet> boundary_facets(const Mesh& mesh) {
  std::map<Facet, int> count;
  std::vector<Facet> local;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    cell_facets(mesh, c, local);
    for (const auto& f : local) ++count[f];
  }
  std::vector<Facet> out;
  for (const auto& [f, n] : count)
    if (n == 1) out.push_back(f);
  return out;
}

ValidationReport validate(const MeshPair& pair, double conformity_tol) {
  ValidationReport report;
  auto fail = [&report](const std::string& msg) {
    report.pass = false;
    report.messages.push_back(msg);
  };

  auto check_mesh = [&](const Mesh& mesh, std::vector<int>& inverted) {
    const std::string name = to_string(mesh.region);
    if (mesh.nodes.cols() != mesh.dim || mesh.cells.cols() != mesh.dim + 1) {
      fail(name + ": coordinate or connectivity width does not match dim");
      return false;
    }
    bool indices_ok = true;
    for (int c = 0; c < mesh.num_cells(); ++c)
      for (int a = 0; a < mesh.nodes_per_cell(); ++a)
        if (mesh.cells(c, a) < 0 || mesh.cells(c, a) >= mesh.num_nodes()) {
          fail(name + ": cell " + std::to_string(c) + " references node out of range");
          indices_ok = false;
        }
    if (!indices_ok) return false;
    for (int c = 0; c < mesh.num_cells(); ++c)
      if (!(mesh.cell_volume(c) > 0.0)) inverted.push_back(c);
    if (!inverted.empty()) {
      std::ostringstream os;
      os << name << ": " << inverted.size() << " non-positive cell(s), first " << inverted.front();
      fail(os.str());
    }

    const auto boundary = boundary_facets(mesh);
    std::map<Facet, int> tag_count;
    for (const auto& tf : mesh.facets) ++tag_count[tf.nodes];
    for (const auto& f : boundary) {
      auto it = tag_count.find(f);
      if (it == tag_count.end()) {
        fail(name + ": untagged boundary facet");
      } else if (it->second != 1) {
        fail(name + ": boundary facet carries " + std::to_string(it->second) + " tags");
      }
    }
    const std::set<Facet> boundary_set(boundary.begin(), boundary.end());
    for (const auto& [f, n] : tag_count)
      if (!boundary_set.count(f)) fail(name + ": tag on a non-boundary facet");
    return true;
  };

  const bool fluid_ok = check_mesh(pair.fluid, report.inverted_fluid_cells);
  const bool solid_ok = check_mesh(pair.solid, report.inverted_solid_cells);
  if (!fluid_ok || !solid_ok) return report;

  std::map<int, int> fluid_seen;
  std::map<int, int> solid_seen;
  for (std::size_t k = 0; k < pair.interface.pairs.size(); ++k) {
    const auto [fi, si] = pair.interface.pairs[k];
    if (fi < 0 || fi >= pair.fluid.num_nodes() || si < 0 || si >= pair.solid.num_nodes()) {
      fail("interface pair " + std::to_string(k) + " out of range");
      continue;
    }
    ++fluid_seen[fi];
    ++solid_seen[si];
    const double gap = (pair.fluid.nodes.row(fi) - pair.solid.nodes.row(si)).norm();
    report.max_interface_gap = std::max(report.max_interface_gap, gap);
    if (gap > conformity_tol) report.nonconforming_pairs.push_back(static_cast<int>(k));
  }
  if (!report.nonconforming_pairs.empty()) {
    std::ostringstream os;
    os << "interface not conforming: " << report.nonconforming_pairs.size()
       << " pair(s), max gap " << report.max_interface_gap << " m";
    fail(os.str());
  }
  for (int n : pair.fluid.nodes_with_tag(tags::interface)) {
    auto it = fluid_seen.find(n);
    if (it == fluid_seen.end() || it->second != 1)
      fail("fluid interface node " + std::to_string(n) + " not paired exactly once");
  }
  for (int n : pair.solid.nodes_with_tag(tags::interface)) {
    auto it = solid_seen.find(n);
    if (it == solid_seen.end() || it->second != 1)
      fail("solid interface node " + std::to_string(n) + " not paired exactly once");
  }
  return report;
}

InterfaceMap match_interface(const Mesh& fluid, const Mesh& solid, double tol) {
  const auto fn = fluid.nodes_with_tag(tags::interface);
  const auto sn = solid.nodes_with_tag(tags::interface);
  InterfaceMap map;
  for (int f : fn) {
    int best = -1;
    double best_d = tol;
    for (int s : sn) {
      const double d = (fluid.nodes.row(f) - solid.nodes.row(s)).norm();
      if (d <= best_d) {
        best_d = d;
        best = s;
      }
    }
    if (best < 0)
      throw ValidationError("fluid interface node " + std::to_string(f) + " has no solid match");
    map.pairs.emplace_back(f, best);
  }
  return map;
}

namespace {

using std::numbers::pi;

/// Planar triangulation under construction; triangles are stored CCW.
struct Builder {
  std::vector<Eigen::Vector2d> points;
  std::vector<std::array<int, 3>> tris;

  int add_point(const Eigen::Vector2d& p) {
    points.push_back(p);
    return static_cast<int>(points.size()) - 1;
  }

  void add_tri(int a, int b, int c) {
    const Eigen::Vector2d u = points[b] - points[a];
    const Eigen::Vector2d v = points[c] - points[a];
    const double area2 = u.x() * v.y() - u.y() * v.x();
    if (std::abs(area2) == 0.0) throw GenerationError("degenerate triangle during meshing");
    if (area2 > 0)
      tris.push_back({a, b, c});
    else
      tris.push_back({a, c, b});
  }
};

int half_ring_segments(double r, double h) {
  return std::max(1, static_cast<int>(std::lround(pi * r / h)));
}

/// Points of a right half ring (theta from -pi/2 to pi/2). The two end points
/// sit exactly on the x = 0 axis.
std::vector<Eigen::Vector2d> half_ring(double r, int m) {
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(static_cast<std::size_t>(m) + 1);
  for (int k = 0; k <= m; ++k) {
    const double theta = -pi / 2 + pi * k / m;
    double x = r * std::cos(theta);
    double y = r * std::sin(theta);
    if (k == 0) {
      x = 0.0;
      y = -r;
    } else if (k == m) {
      x = 0.0;
      y = r;
    } else if (2 * k == m) {
      y = 0.0;
    }
    pts.emplace_back(x, y);
  }
  return pts;
}

double ring_angle(int k, int m) { return -pi / 2 + pi * k / m; }

/// Fan of triangles between two half rings sharing the same angular span.
void stitch_rings(Builder& b, const std::vector<int>& inner, const std::vector<int>& outer) {
  const int m = static_cast<int>(inner.size()) - 1;
  const int n = static_cast<int>(outer.size()) - 1;
  int p = 0;
  int q = 0;
  while (p < m || q < n) {
    bool advance_inner;
    if (p == m)
      advance_inner = false;
    else if (q == n)
      advance_inner = true;
    else
      advance_inner = ring_angle(p + 1, m) < ring_angle(q + 1, n);
    if (advance_inner) {
      b.add_tri(inner[p], outer[q], inner[p + 1]);
      ++p;
    } else {
      b.add_tri(inner[p], outer[q], outer[q + 1]);
      ++q;
    }
  }
}

/// Reflects a right-half triangulation about x = 0. Nodes with x == 0 are shared.
Mesh mirror_to_mesh(const Builder& half, Region region) {
  const int n_half = static_cast<int>(half.points.size());
  std::vector<int> mirror_index(static_cast<std::size_t>(n_half));
  int next = n_half;
  for (int i = 0; i < n_half; ++i) mirror_index[i] = (half.points[i].x() == 0.0) ? i : next++;

  Mesh mesh;
  mesh.dim = 2;
  mesh.region = region;
  mesh.nodes.resize(next, 2);
  for (int i = 0; i < n_half; ++i) {
    mesh.nodes(i, 0) = half.points[i].x();
    mesh.nodes(i, 1) = half.points[i].y();
    if (mirror_index[i] != i) {
      mesh.nodes(mirror_index[i], 0) = -half.points[i].x();
      mesh.nodes(mirror_index[i], 1) = half.points[i].y();
    }
  }
  const int n_tri = static_cast<int>(half.tris.size());
  mesh.cells.resize(2 * n_tri, 3);
  for (int t = 0; t < n_tri; ++t) {
    const auto& tri = half.tris[t];
    mesh.cells.row(t) << tri[0], tri[1], tri[2];
    // reflection flips orientation
    mesh.cells.row(n_tri + t) << mirror_index[tri[0]], mirror_index[tri[2]], mirror_index[tri[1]];
  }
  return mesh;
}

void tag_boundary(Mesh& mesh, const std::set<int>& interface_nodes, const char* other_tag) {
  mesh.facets.clear();
  for (const auto& f : boundary_facets(mesh)) {
    const bool on_interface = interface_nodes.count(f[0]) && interface_nodes.count(f[1]);
    mesh.facets.push_back({f, on_interface ? tags::interface : other_tag});
  }
}

void check_pair(const MeshPair& pair) {
  const auto report = validate(pair);
  if (!report.pass) {
    std::string msg = "generated mesh pair failed validation:";
    for (const auto& m : report.messages) msg += " " + m + ";";
    throw ValidationError(msg);
  }
}

}  // namespace

MeshPair generate_annulus_benchmark(double fluid_radius, double wall_thickness, double target_h) {
  if (!(fluid_radius > 0) || !(wall_thickness > 0) || !(target_h > 0))
    throw ParameterError("annulus benchmark: dimensions must be positive");
  if (!(target_h < fluid_radius / 5))
    throw ParameterError("annulus benchmark: target_h too coarse (must be < fluid_radius / 5)");

  const int n_fluid_rings = static_cast<int>(std::ceil(fluid_radius / target_h - 1e-9));
  const int n_solid_rings = std::max(1, static_cast<int>(std::ceil(wall_thickness / target_h - 1e-9)));

  // Fluid half disc.
  Builder fluid;
  std::vector<int> prev{fluid.add_point(Eigen::Vector2d::Zero())};
  std::vector<int> interface_ids;
  for (int i = 1; i <= n_fluid_rings; ++i) {
    const double r = (i == n_fluid_rings) ? fluid_radius : fluid_radius * i / n_fluid_rings;
    std::vector<int> ring;
    for (const auto& p : half_ring(r, half_ring_segments(r, target_h))) ring.push_back(fluid.add_point(p));
    if (i == 1) {
      for (std::size_t q = 0; q + 1 < ring.size(); ++q) fluid.add_tri(prev[0], ring[q], ring[q + 1]);
    } else {
      stitch_rings(fluid, prev, ring);
    }
    prev = std::move(ring);
  }
  interface_ids = prev;

  // Solid half annulus, starting from the same interface ring.
  Builder solid;
  std::vector<int> sprev;
  for (const auto& p : half_ring(fluid_radius, half_ring_segments(fluid_radius, target_h)))
    sprev.push_back(solid.add_point(p));
  const std::vector<int> solid_interface_ids = sprev;
  for (int j = 1; j <= n_solid_rings; ++j) {
    const double r = fluid_radius + wall_thickness * j / n_solid_rings;
    std::vector<int> ring;
    for (const auto& p : half_ring(r, half_ring_segments(r, target_h))) ring.push_back(solid.add_point(p));
    stitch_rings(solid, sprev, ring);
    sprev = std::move(ring);
  }

  MeshPair pair;
  pair.fluid = mirror_to_mesh(fluid, Region::fluid);
  pair.solid = mirror_to_mesh(solid, Region::solid);

  auto interface_set = [](const Mesh& mesh, double r) {
    std::set<int> s;
    for (int i = 0; i < mesh.num_nodes(); ++i)
      if (std::abs(mesh.nodes.row(i).norm() - r) <= 1e-12 * r) s.insert(i);
    return s;
  };
  tag_boundary(pair.fluid, interface_set(pair.fluid, fluid_radius), tags::interface);
  tag_boundary(pair.solid, interface_set(pair.solid, fluid_radius), tags::exterior);
  pair.interface = match_interface(pair.fluid, pair.solid);
  check_pair(pair);
  return pair;
}

Mesh generate_rectangle(double x0, double y0, double x1, double y1, int nx, int ny, Region region) {
  if (nx < 1 || ny < 1 || !(x1 > x0) || !(y1 > y0))
    throw ParameterError("rectangle: invalid extent or resolution");
  Mesh mesh;
  mesh.dim = 2;
  mesh.region = region;
  mesh.nodes.resize((nx + 1) * (ny + 1), 2);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const int n = i + j * (nx + 1);
      mesh.nodes(n, 0) = (i == nx) ? x1 : x0 + (x1 - x0) * i / nx;
      mesh.nodes(n, 1) = (j == ny) ? y1 : y0 + (y1 - y0) * j / ny;
    }
  mesh.cells.resize(2 * nx * ny, 3);
  int c = 0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int n00 = i + j * (nx + 1);
      const int n10 = n00 + 1;
      const int n01 = n00 + nx + 1;
      const int n11 = n01 + 1;
      mesh.cells.row(c++) << n00, n10, n11;
      mesh.cells.row(c++) << n00, n11, n01;
    }
  for (const auto& f : boundary_facets(mesh)) mesh.facets.push_back({f, tags::wall});
  return mesh;
}

MeshPair generate_channel_benchmark(double length, double height, double target_h,
                                    double wall_thickness) {
  if (!(length > 0) || !(height > 0) || !(target_h > 0) || !(wall_thickness > 0))
    throw ParameterError("channel benchmark: dimensions must be positive");
  if (!(target_h < height / 4))
    throw ParameterError("channel benchmark: target_h too coarse (must be < height / 4)");

  const int nx = static_cast<int>(std::ceil(length / target_h - 1e-9));
  const int ny = static_cast<int>(std::ceil(height / target_h - 1e-9));
  const int nw = std::max(1, static_cast<int>(std::ceil(wall_thickness / target_h - 1e-9)));

  MeshPair pair;
  pair.fluid = generate_rectangle(0.0, 0.0, length, height, nx, ny, Region::fluid);
  pair.fluid.facets.clear();
  for (const auto& f : boundary_facets(pair.fluid)) {
    const auto& a = pair.fluid.nodes.row(f[0]);
    const auto& b = pair.fluid.nodes.row(f[1]);
    const char* tag = tags::interface;
    if (a(0) == 0.0 && b(0) == 0.0)
      tag = tags::inlet;
    else if (a(0) == length && b(0) == length)
      tag = tags::outlet;
    pair.fluid.facets.push_back({f, tag});
  }

  const Mesh bottom =
      generate_rectangle(0.0, -wall_thickness, length, 0.0, nx, nw, Region::solid);
  const Mesh top =
      generate_rectangle(0.0, height, length, height + wall_thickness, nx, nw, Region::solid);
  Mesh& solid = pair.solid;
  solid.dim = 2;
  solid.region = Region::solid;
  solid.nodes.resize(bottom.num_nodes() + top.num_nodes(), 2);
  solid.nodes << bottom.nodes, top.nodes;
  solid.cells.resize(bottom.num_cells() + top.num_cells(), 3);
  solid.cells << bottom.cells, (top.cells.array() + bottom.num_nodes()).matrix();
  for (const auto& f : boundary_facets(solid)) {
    const double ya = solid.nodes(f[0], 1);
    const double yb = solid.nodes(f[1], 1);
    const bool on_interface = (ya == 0.0 && yb == 0.0) || (ya == height && yb == height);
    solid.facets.push_back({f, on_interface ? tags::interface : tags::exterior});
  }
  pair.interface = match_interface(pair.fluid, pair.solid);
  check_pair(pair);
  return pair;
}

Eigen::Vector2d circumferential_fiber(const Eigen::Vector2d& point) {
  const double r = point.norm();
  if (!(r > 0)) throw ParameterError("circumferential fiber undefined at the origin");
  return Eigen::Vector2d(-point.y() / r, point.x() / r);
}

Eigen::MatrixXd circumferential_fibers(const Mesh& mesh) {
  Eigen::MatrixXd f(mesh.num_cells(), 2);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Eigen::Vector2d x = mesh.cell_centroid(c).head<2>();
    f.row(c) = circumferential_fiber(x).transpose();
  }
  return f;
}

Eigen::MatrixXd current_coordinates(const Mesh& mesh, const NodalField& displacement) {
  if (displacement.num_nodes() != mesh.num_nodes() || displacement.components() != mesh.dim)
    throw ShapeError("displacement shape (" + std::to_string(displacement.num_nodes()) + " x " +
                     std::to_string(displacement.components()) + ") does not match mesh (" +
                     std::to_string(mesh.num_nodes()) + " x " + std::to_string(mesh.dim) + ")");
  return mesh.nodes + displacement.values;
}

}  // namespace riisfsi
