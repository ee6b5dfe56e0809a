#include "riisfsi/mesh_io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>

#include "riisfsi/errors.hpp"

namespace riisfsi {

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << "riisfsi-mesh 1\n";
  os << "dim " << mesh.dim << "\n";
  os << "region " << to_string(mesh.region) << "\n";
  os << "nodes " << mesh.num_nodes() << "\n";
  os << std::setprecision(17);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    for (int k = 0; k < mesh.dim; ++k) os << (k ? " " : "") << mesh.nodes(i, k);
    os << "\n";
  }
  os << "cells " << mesh.num_cells() << "\n";
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int a = 0; a < mesh.nodes_per_cell(); ++a) os << (a ? " " : "") << mesh.cells(c, a);
    os << "\n";
  }
  os << "tags " << mesh.facets.size() << "\n";
  for (const auto& f : mesh.facets) {
    for (int a = 0; a < mesh.dim; ++a) os << f.nodes[a] << " ";
    os << f.tag << "\n";
  }
}

namespace {

void expect(std::istream& is, const std::string& keyword) {
  std::string word;
  if (!(is >> word) || word != keyword)
    throw IoError("mesh file: expected '" + keyword + "', found '" + word + "'");
}

}  // namespace

Mesh read_mesh(std::istream& is) {
  expect(is, "riisfsi-mesh");
  int version = 0;
  is >> version;
  if (version != 1) throw IoError("mesh file: unsupported version " + std::to_string(version));
  Mesh mesh;
  expect(is, "dim");
  is >> mesh.dim;
  if (mesh.dim != 2 && mesh.dim != 3) throw IoError("mesh file: dim must be 2 or 3");
  expect(is, "region");
  std::string region;
  is >> region;
  if (region == "fluid")
    mesh.region = Region::fluid;
  else if (region == "solid")
    mesh.region = Region::solid;
  else
    throw IoError("mesh file: unknown region '" + region + "'");

  expect(is, "nodes");
  int n = 0;
  is >> n;
  mesh.nodes.resize(n, mesh.dim);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < mesh.dim; ++k) is >> mesh.nodes(i, k);

  expect(is, "cells");
  int m = 0;
  is >> m;
  mesh.cells.resize(m, mesh.dim + 1);
  for (int c = 0; c < m; ++c)
    for (int a = 0; a <= mesh.dim; ++a) is >> mesh.cells(c, a);

  expect(is, "tags");
  int k = 0;
  is >> k;
  for (int t = 0; t < k; ++t) {
    TaggedFacet f{{-1, -1, -1}, {}};
    for (int a = 0; a < mesh.dim; ++a) is >> f.nodes[a];
    is >> f.tag;
    std::sort(f.nodes.begin(), f.nodes.begin() + mesh.dim);
    mesh.facets.push_back(std::move(f));
  }
  if (!is) throw IoError("mesh file: truncated or malformed");
  return mesh;
}

void write_mesh_file(const std::string& path, const Mesh& mesh) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_mesh(os, mesh);
  if (!os) throw IoError("write failed: '" + path + "'");
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return read_mesh(is);
}

}  // namespace riisfsi
