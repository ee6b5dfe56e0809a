#include "riisfsi/quadrature.hpp"

#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "riisfsi/errors.hpp"

namespace riisfsi {

void gauss_legendre_01(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  // Golub-Welsch on the Jacobi matrix of the Legendre recurrence.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = b;
    jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
  nodes = (eig.eigenvalues().array() + 1.0) / 2.0;
  weights = eig.eigenvectors().row(0).transpose().array().square();  // sums to 1
}

namespace {

QuadratureRule triangle(int degree) {
  QuadratureRule q;
  q.dim = 2;
  q.degree = degree;
  if (degree <= 1) {
    q.points.resize(1, 2);
    q.points << 1.0 / 3.0, 1.0 / 3.0;
    q.weights.resize(1);
    q.weights << 0.5;
  } else if (degree == 2) {
    q.points.resize(3, 2);
    q.points << 1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0;
    q.weights = Eigen::VectorXd::Constant(3, 1.0 / 6.0);
  } else {
    // 6-point symmetric rule, exact to degree 4, positive weights.
    const double a1 = 0.445948490915964886;
    const double w1 = 0.223381589678011466;
    const double a2 = 0.091576213509770743;
    const double w2 = 0.109951743655321868;
    const std::array<std::array<double, 3>, 6> bary{{{1 - 2 * a1, a1, a1},
                                                     {a1, 1 - 2 * a1, a1},
                                                     {a1, a1, 1 - 2 * a1},
                                                     {1 - 2 * a2, a2, a2},
                                                     {a2, 1 - 2 * a2, a2},
                                                     {a2, a2, 1 - 2 * a2}}};
    q.points.resize(6, 2);
    q.weights.resize(6);
    for (int i = 0; i < 6; ++i) {
      q.points(i, 0) = bary[i][1];
      q.points(i, 1) = bary[i][2];
      q.weights(i) = 0.5 * (i < 3 ? w1 : w2);
    }
    q.degree = 4;
  }
  return q;
}

QuadratureRule tetrahedron(int degree) {
  QuadratureRule q;
  q.dim = 3;
  q.degree = degree;
  if (degree <= 1) {
    q.points = Eigen::MatrixXd::Constant(1, 3, 0.25);
    q.weights = Eigen::VectorXd::Constant(1, 1.0 / 6.0);
    return q;
  }
  if (degree == 2) {
    const double a = 0.5854101966249685;
    const double b = 0.1381966011250105;
    q.points.resize(4, 3);
    q.points << b, b, b, a, b, b, b, a, b, b, b, a;
    q.weights = Eigen::VectorXd::Constant(4, 1.0 / 24.0);
    return q;
  }
  // Duffy map x = u, y = v (1 - u), z = w (1 - u)(1 - v); a degree-p polynomial
  // becomes degree p + 2 in u, so n = ceil((p + 3) / 2) points per direction.
  const int n = (degree + 4) / 2;
  Eigen::VectorXd t, w;
  gauss_legendre_01(n, t, w);
  q.points.resize(n * n * n, 3);
  q.weights.resize(n * n * n);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const double u = t(i), v = t(j), s = t(l);
        q.points(k, 0) = u;
        q.points(k, 1) = v * (1 - u);
        q.points(k, 2) = s * (1 - u) * (1 - v);
        q.weights(k) = w(i) * w(j) * w(l) * (1 - u) * (1 - u) * (1 - v);
        ++k;
      }
  return q;
}

}  // namespace

QuadratureRule quadrature_rule(int dim, int degree) {
  if (degree < 1 || degree > 4)
    throw ParameterError("quadrature degree " + std::to_string(degree) + " unsupported (1..4)");
  if (dim == 2) return triangle(degree);
  if (dim == 3) return tetrahedron(degree);
  throw ParameterError("quadrature dimension must be 2 or 3");
}

const QuadratureRule& triangle_rule(int degree) {
  static const std::array<QuadratureRule, 4> rules{triangle(1), triangle(2), triangle(3),
                                                   triangle(4)};
  if (degree < 1 || degree > 4)
    throw ParameterError("quadrature degree " + std::to_string(degree) + " unsupported (1..4)");
  return rules[static_cast<std::size_t>(degree - 1)];
}

}  // namespace riisfsi
