#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Core>

#include "riisfsi/fluid.hpp"
#include "riisfsi/kinematics.hpp"
#include "riisfsi/mesh.hpp"
#include "riisfsi/quadrature.hpp"

namespace riisfsi::oracle {

// Divergence-free velocity and zero-mean pressure on the unit square.
struct StokesMms {
  static constexpr double pi = std::numbers::pi;
  double mu = 1.0;

  Eigen::Vector2d velocity(const Eigen::Vector2d& x) const {
    const double sx = std::sin(pi * x.x()), sy = std::sin(pi * x.y());
    return {pi * sx * sx * std::sin(2 * pi * x.y()), -pi * std::sin(2 * pi * x.x()) * sy * sy};
  }
  double pressure(const Eigen::Vector2d& x) const {
    return std::cos(pi * x.x()) * std::cos(pi * x.y());
  }
  // f = -mu lap(u) + grad(p)
  Eigen::Vector2d force(const Eigen::Vector2d& x) const {
    const double c2x = std::cos(2 * pi * x.x()), c2y = std::cos(2 * pi * x.y());
    const double s2x = std::sin(2 * pi * x.x()), s2y = std::sin(2 * pi * x.y());
    const double p3 = 2 * pi * pi * pi;
    const Eigen::Vector2d lap(p3 * s2y * (2 * c2x - 1), -p3 * s2x * (2 * c2y - 1));
    const Eigen::Vector2d grad_p(-pi * std::sin(pi * x.x()) * std::cos(pi * x.y()),
                                 -pi * std::cos(pi * x.x()) * std::sin(pi * x.y()));
    return -mu * lap + grad_p;
  }
};

struct MmsErrors {
  double velocity_l2 = 0.0;
  double pressure_l2 = 0.0;
};

// Solves steady Stokes on an n x n structured mesh and measures L2 errors with
// a degree-4 rule.
inline MmsErrors stokes_mms_errors(int n, double beta = 0.1) {
  const StokesMms mms;
  const Mesh mesh = generate_rectangle(0.0, 0.0, 1.0, 1.0, n, n);
  FluidStepInput in;
  in.coords = mesh.nodes;
  in.transient = false;
  in.convection = false;
  in.body_force = [mms](const Eigen::Vector2d& x) { return mms.force(x); };
  FluidSolveOptions opt;
  opt.dirichlet.push_back({tags::wall, [mms](const Eigen::Vector2d& x) { return mms.velocity(x); }});
  opt.mean_pressure_gauge = true;
  opt.newton.abs_tol = 1e-11;
  const FluidSolution sol = solve_fluid(mesh, FluidParams{1.0, mms.mu, beta}, in, opt);

  const QuadratureRule& rule = triangle_rule(4);
  MmsErrors e;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Simplex<2> s = cell_simplex<2>(mesh, mesh.nodes, c);
    Eigen::Matrix<double, 3, 2> x;
    for (int a = 0; a < 3; ++a) x.row(a) = mesh.nodes.row(mesh.cells(c, a));
    for (int q = 0; q < rule.size(); ++q) {
      const double r = rule.points(q, 0), t = rule.points(q, 1);
      const Eigen::Vector3d nq(1 - r - t, r, t);
      const Eigen::Vector2d xq = x.transpose() * nq;
      Eigen::Vector2d uh = Eigen::Vector2d::Zero();
      double ph = 0.0;
      for (int a = 0; a < 3; ++a) {
        uh += nq(a) * sol.u.values.row(mesh.cells(c, a)).transpose();
        ph += nq(a) * sol.p(mesh.cells(c, a), 0);
      }
      const double w = 2.0 * s.measure * rule.weights(q);
      e.velocity_l2 += w * (uh - mms.velocity(xq)).squaredNorm();
      e.pressure_l2 += w * std::pow(ph - mms.pressure(xq), 2);
    }
  }
  e.velocity_l2 = std::sqrt(e.velocity_l2);
  e.pressure_l2 = std::sqrt(e.pressure_l2);
  return e;
}

}  // namespace riisfsi::oracle
