#pragma once

#include <Eigen/Core>

namespace riisfsi {

/// Quadrature on the reference simplex {x_i >= 0, sum x_i <= 1}.
struct QuadratureRule {
  int dim = 2;
  int degree = 1;
  Eigen::MatrixXd points;   // n x dim
  Eigen::VectorXd weights;  // n, sum = 1/2 (triangle) or 1/6 (tetrahedron)

  int size() const { return static_cast<int>(weights.size()); }
};

/// Rule exact for polynomials up to `degree` (1..4) on the reference simplex.
/// Triangles use symmetric positive-weight rules; tetrahedra use collapsed
/// Gauss-Legendre products. Throws ParameterError otherwise.
QuadratureRule quadrature_rule(int dim, int degree);

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre_01(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

/// Cached triangle rules; quadrature_rule() allocates on every call.
const QuadratureRule& triangle_rule(int degree);

}  // namespace riisfsi
