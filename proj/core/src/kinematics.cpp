#include "riisfsi/kinematics.hpp"

#include "riisfsi/errors.hpp"

namespace riisfsi {

namespace {

template <int D>
DeformationState state_impl(const Mesh& mesh, const NodalField& displacement, int cell) {
  const auto ref = cell_simplex<D>(mesh, mesh.nodes, cell);
  Eigen::Matrix<double, D + 1, D> d;
  for (int a = 0; a <= D; ++a) d.row(a) = displacement.values.row(mesh.cells(cell, a)).template head<D>();
  DeformationState s;
  const Eigen::Matrix<double, D, D> F = deformation_gradient<D>(ref, d);
  s.F = F;
  s.J = F.determinant();
  if (!(s.J > 0.0)) throw InvertedElementError(cell, s.J);
  return s;
}

}  // namespace

DeformationState deformation_state(const Mesh& mesh, const NodalField& displacement, int cell,
                                   const Eigen::VectorXd& /*quad_point*/) {
  if (displacement.num_nodes() != mesh.num_nodes() || displacement.components() != mesh.dim)
    throw ShapeError("displacement field does not match mesh");
  if (cell < 0 || cell >= mesh.num_cells()) throw ShapeError("cell index out of range");
  return mesh.dim == 2 ? state_impl<2>(mesh, displacement, cell)
                       : state_impl<3>(mesh, displacement, cell);
}

}  // namespace riisfsi
