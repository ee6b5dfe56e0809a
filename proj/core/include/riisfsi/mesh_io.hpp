#pragma once

#include <iosfwd>
#include <string>

#include "riisfsi/mesh.hpp"

namespace riisfsi {

// Plain-text mesh format:
//
//   riisfsi-mesh 1
//   dim <2|3>
//   region <fluid|solid>
//   nodes <N>
//   <x> <y> [<z>]           (N lines)
//   cells <M>
//   <n0> <n1> <n2> [<n3>]   (M lines, 0-based)
//   tags <K>
//   <n0> <n1> [<n2>] <tag>  (K lines, facet nodes then label)
//
// Coordinates are written with 17 significant digits so a write/read cycle
// reproduces the mesh bit for bit.

void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

void write_mesh_file(const std::string& path, const Mesh& mesh);
Mesh read_mesh_file(const std::string& path);

}  // namespace riisfsi
