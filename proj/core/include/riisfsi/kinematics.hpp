#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include "riisfsi/mesh.hpp"
#include "riisfsi/nodal_field.hpp"

namespace riisfsi {

/// Affine simplex: node coordinates, constant P1 basis gradients, measure.
template <int D>
struct Simplex {
  static constexpr int nodes = D + 1;
  using Coords = Eigen::Matrix<double, D + 1, D>;

  Coords x;
  Coords grads;  // row a = grad N_a
  double measure = 0.0;  // signed

  double diameter() const {
    double h = 0.0;
    for (int a = 0; a < nodes; ++a)
      for (int b = a + 1; b < nodes; ++b) h = std::max(h, (x.row(a) - x.row(b)).norm());
    return h;
  }

  Eigen::Matrix<double, D, 1> centroid() const { return x.colwise().mean().transpose(); }

  /// Physical point of reference-simplex coordinates `xi`.
  Eigen::Matrix<double, D, 1> map(const Eigen::Matrix<double, D, 1>& xi) const {
    Eigen::Matrix<double, D, 1> p = x.row(0).transpose();
    for (int k = 0; k < D; ++k) p += xi(k) * (x.row(k + 1) - x.row(0)).transpose();
    return p;
  }

  /// P1 basis values at reference coordinates `xi`.
  static Eigen::Matrix<double, D + 1, 1> shape(const Eigen::Matrix<double, D, 1>& xi) {
    Eigen::Matrix<double, D + 1, 1> n;
    n(0) = 1.0 - xi.sum();
    n.template tail<D>() = xi;
    return n;
  }
};

template <int D>
Simplex<D> make_simplex(const typename Simplex<D>::Coords& x) {
  Simplex<D> s;
  s.x = x;
  Eigen::Matrix<double, D, D> jac;  // columns are edge vectors
  for (int k = 0; k < D; ++k) jac.col(k) = (x.row(k + 1) - x.row(0)).transpose();
  const double det = jac.determinant();
  s.measure = det / (D == 2 ? 2.0 : 6.0);
  const Eigen::Matrix<double, D, D> inv_t = jac.inverse().transpose();
  // grad N_{k+1} = J^{-T} e_k, grad N_0 = -sum
  for (int k = 0; k < D; ++k) s.grads.row(k + 1) = inv_t.col(k).transpose();
  s.grads.row(0) = -s.grads.bottomRows(D).colwise().sum();
  return s;
}

template <int D>
Simplex<D> cell_simplex(const Mesh& mesh, const Eigen::MatrixXd& coords, int cell) {
  typename Simplex<D>::Coords x;
  for (int a = 0; a <= D; ++a) x.row(a) = coords.row(mesh.cells(cell, a)).template head<D>();
  return make_simplex<D>(x);
}

/// F = I + sum_a d_a (x) grad N_a for a P1 displacement on a reference simplex.
template <int D>
Eigen::Matrix<double, D, D> deformation_gradient(const Simplex<D>& reference,
                                                 const Eigen::Matrix<double, D + 1, D>& disp) {
  return Eigen::Matrix<double, D, D>::Identity() + disp.transpose() * reference.grads;
}

struct DeformationState {
  Eigen::MatrixXd F;
  double J = 1.0;
};

/// Deformation gradient and its determinant at a quadrature point of `cell`
/// (constant over the cell for P1). Throws InvertedElementError if J <= 0.
DeformationState deformation_state(const Mesh& mesh, const NodalField& displacement, int cell,
                                   const Eigen::VectorXd& quad_point);

}  // namespace riisfsi
