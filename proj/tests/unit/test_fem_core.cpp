#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "riisfsi/assembly.hpp"
#include "riisfsi/errors.hpp"
#include "riisfsi/kinematics.hpp"
#include "riisfsi/linear_solver.hpp"
#include "riisfsi/mesh.hpp"
#include "riisfsi/newton.hpp"
#include "riisfsi/quadrature.hpp"

using namespace riisfsi;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

// Closed-form monomial integrals over the reference simplex.
double triangle_monomial(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }
double tet_monomial(int a, int b, int c) {
  return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
}

struct P1Problem {
  Mesh mesh;
  DofMap dofs;
  ElementGroup group;
};

P1Problem unit_square(int n) {
  P1Problem p;
  p.mesh = generate_rectangle(0, 0, 1, 1, n, n);
  const int f = p.dofs.add_field("v", p.mesh.num_nodes(), 1);
  p.dofs.finalize();
  p.group.name = "cells";
  for (int c = 0; c < p.mesh.num_cells(); ++c) {
    std::vector<DofRef> l;
    for (int a = 0; a < 3; ++a) l.push_back(p.dofs(f, p.mesh.cells(c, a), 0));
    p.group.dofs.push_back(l);
  }
  return p;
}

}  // namespace

TEST(Quadrature, MidpointTriangle) {
  const QuadratureRule q = quadrature_rule(2, 1);
  ASSERT_EQ(q.size(), 1);
  EXPECT_DOUBLE_EQ(q.weights(0), 0.5);
  EXPECT_NEAR(q.points(0, 0), 1.0 / 3.0, 1e-15);
}

TEST(Quadrature, TetrahedronWeightsSumToVolume) {
  for (int d = 1; d <= 4; ++d) EXPECT_NEAR(quadrature_rule(3, d).weights.sum(), 1.0 / 6.0, 1e-15);
}

TEST(Quadrature, TriangleMonomialExactness) {
  for (int d = 1; d <= 4; ++d) {
    const QuadratureRule q = quadrature_rule(2, d);
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b) {
        double s = 0.0;
        for (int k = 0; k < q.size(); ++k)
          s += q.weights(k) * std::pow(q.points(k, 0), a) * std::pow(q.points(k, 1), b);
        EXPECT_NEAR(s, triangle_monomial(a, b), 1e-14) << "degree " << d << " x^" << a << " y^" << b;
      }
  }
}

TEST(Quadrature, TetrahedronMonomialExactness) {
  for (int d = 1; d <= 4; ++d) {
    const QuadratureRule q = quadrature_rule(3, d);
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b)
        for (int c = 0; a + b + c <= d; ++c) {
          double s = 0.0;
          for (int k = 0; k < q.size(); ++k)
            s += q.weights(k) * std::pow(q.points(k, 0), a) * std::pow(q.points(k, 1), b) *
                 std::pow(q.points(k, 2), c);
          EXPECT_NEAR(s, tet_monomial(a, b, c), 1e-14) << "degree " << d;
        }
  }
}

TEST(Quadrature, RejectsUnsupportedDegree) {
  EXPECT_THROW(quadrature_rule(2, 0), ParameterError);
  EXPECT_THROW(quadrature_rule(2, 5), ParameterError);
  EXPECT_THROW(quadrature_rule(4, 1), ParameterError);
}

TEST(Kinematics, PartitionOfUnity) {
  for (int d = 1; d <= 4; ++d) {
    const QuadratureRule q = quadrature_rule(2, d);
    for (int k = 0; k < q.size(); ++k)
      EXPECT_NEAR(Simplex<2>::shape(q.points.row(k).transpose()).sum(), 1.0, 1e-14);
    const QuadratureRule t = quadrature_rule(3, d);
    for (int k = 0; k < t.size(); ++k)
      EXPECT_NEAR(Simplex<3>::shape(t.points.row(k).transpose()).sum(), 1.0, 1e-14);
  }
}

TEST(Kinematics, DeformationStateIdentityAndDilation) {
  const Mesh m = generate_rectangle(0, 0, 1, 1, 3, 3, Region::solid);
  const Eigen::VectorXd xi = Eigen::Vector2d(1.0 / 3, 1.0 / 3);
  const DeformationState s0 = deformation_state(m, NodalField(m.num_nodes(), 2), 4, xi);
  EXPECT_TRUE(s0.F.isApprox(Eigen::Matrix2d::Identity()));
  EXPECT_DOUBLE_EQ(s0.J, 1.0);

  NodalField d(m.num_nodes(), 2);
  d.values = 0.1 * m.nodes;
  const DeformationState s1 = deformation_state(m, d, 4, xi);
  EXPECT_NEAR((s1.F - 1.1 * Eigen::Matrix2d::Identity()).norm(), 0.0, 1e-14);
  EXPECT_NEAR(s1.J, 1.21, 1e-14);
}

TEST(Kinematics, RandomAffineReproduced) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  const Mesh m = generate_rectangle(-1, -1, 1, 1, 4, 4, Region::solid);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::Matrix2d A;
    A << u(rng), u(rng), u(rng), u(rng);
    const Eigen::Vector2d b(u(rng), u(rng));
    NodalField d(m.num_nodes(), 2);
    for (int n = 0; n < m.num_nodes(); ++n)
      d.values.row(n) = (A * m.nodes.row(n).transpose() + b).transpose();
    for (int c = 0; c < m.num_cells(); ++c) {
      const DeformationState s = deformation_state(m, d, c, Eigen::Vector2d(0.2, 0.3));
      EXPECT_LE((s.F - (Eigen::Matrix2d::Identity() + A)).norm(), 1e-12);
      EXPECT_NEAR(s.J, (Eigen::Matrix2d::Identity() + A).determinant(), 1e-12);
    }
  }
}

TEST(Kinematics, InvertedElementCarriesCellIndex) {
  const Mesh m = generate_rectangle(0, 0, 1, 1, 2, 2, Region::solid);
  NodalField d(m.num_nodes(), 2);
  d.values.col(0) = -2.0 * m.nodes.col(0);  // reflection x -> -x
  d.values.col(1).setZero();
  try {
    deformation_state(m, d, 3, Eigen::Vector2d(0.25, 0.25));
    FAIL() << "expected InvertedElementError";
  } catch (const InvertedElementError& e) {
    EXPECT_EQ(e.cell(), 3);
    EXPECT_LT(e.jacobian(), 0.0);
  }
  EXPECT_THROW(deformation_state(m, NodalField(m.num_nodes(), 1), 0, Eigen::Vector2d(0.2, 0.2)),
               ShapeError);
}

TEST(Assembly, ZeroKernelsGiveZeroSystem) {
  P1Problem p = unit_square(3);
  Assembler a(p.dofs.num_dofs(), {p.group});
  const std::vector<LocalKernel> k{[](int, LocalSystem& l) { l.reset(3); }};
  const SparseSystem s = a.assemble(k);
  EXPECT_EQ(s.rhs.norm(), 0.0);
  EXPECT_EQ(Eigen::MatrixXd(s.matrix).norm(), 0.0);
}

TEST(Assembly, MassRowSumsGiveAreaAndStiffnessKillsConstants) {
  P1Problem p = unit_square(5);
  Assembler a(p.dofs.num_dofs(), {p.group});
  const Mesh& m = p.mesh;
  const std::vector<LocalKernel> mass{[&](int c, LocalSystem& l) {
    const Simplex<2> s = cell_simplex<2>(m, m.nodes, c);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) l.jacobian(i, j) = s.measure * (i == j ? 2.0 : 1.0) / 12.0;
  }};
  const SparseSystem sm = a.assemble(mass);
  EXPECT_NEAR(Eigen::MatrixXd(sm.matrix).sum(), 1.0, 1e-12);

  const std::vector<LocalKernel> stiff{[&](int c, LocalSystem& l) {
    const Simplex<2> s = cell_simplex<2>(m, m.nodes, c);
    l.jacobian = s.measure * s.grads * s.grads.transpose();
  }};
  const SparseSystem sk = a.assemble(stiff);
  EXPECT_LE((sk.matrix * Eigen::VectorXd::Constant(m.num_nodes(), 3.7)).norm(), 1e-12);
}

TEST(Assembly, RepeatedAssemblyIsBitwiseIdentical) {
  P1Problem p = unit_square(6);
  Assembler a(p.dofs.num_dofs(), {p.group});
  const std::vector<LocalKernel> k{[&](int c, LocalSystem& l) {
    for (int i = 0; i < 3; ++i) {
      l.residual(i) = std::sin(0.37 * c + i);
      for (int j = 0; j < 3; ++j) l.jacobian(i, j) = std::cos(c * 0.11 + i - 2.0 * j);
    }
  }};
  const SparseSystem s1 = a.assemble(k), s2 = a.assemble(k);
  EXPECT_EQ(s1.rhs, s2.rhs);
  EXPECT_EQ(Eigen::MatrixXd(s1.matrix), Eigen::MatrixXd(s2.matrix));
}

TEST(Assembly, NonFiniteEntryReportsElement) {
  P1Problem p = unit_square(2);
  Assembler a(p.dofs.num_dofs(), {p.group});
  const std::vector<LocalKernel> k{[](int c, LocalSystem& l) {
    if (c == 5) l.residual(1) = std::numeric_limits<double>::quiet_NaN();
  }};
  try {
    a.assemble(k);
    FAIL() << "expected AssemblyError";
  } catch (const AssemblyError& e) {
    EXPECT_EQ(e.cell(), 5);
  }
}

TEST(Assembly, LinkedAndConstrainedDofs) {
  DofMap dofs;
  const int f = dofs.add_field("a", 3, 1);
  const int g = dofs.add_field("b", 1, 1);
  dofs.constrain(f, 0, 0);
  dofs.link(f, 2, 0, g, 0, 0, 0.5);
  dofs.finalize();
  EXPECT_EQ(dofs.num_dofs(), 2);
  EXPECT_LT(dofs(f, 0, 0).index, 0);
  EXPECT_EQ(dofs(f, 2, 0).index, dofs(g, 0, 0).index);
  EXPECT_DOUBLE_EQ(dofs(f, 2, 0).scale, 0.5);

  ElementGroup grp{"e", {{dofs(f, 0, 0), dofs(f, 1, 0), dofs(f, 2, 0)}}};
  Assembler a(dofs.num_dofs(), {grp});
  const std::vector<LocalKernel> k{[](int, LocalSystem& l) {
    l.residual << 1, 2, 3;
    l.jacobian.setOnes();
  }};
  const SparseSystem s = a.assemble(k);
  const int i1 = dofs(f, 1, 0).index, i2 = dofs(g, 0, 0).index;
  EXPECT_DOUBLE_EQ(s.rhs(i1), -2.0);
  EXPECT_DOUBLE_EQ(s.rhs(i2), -3.0);
  EXPECT_DOUBLE_EQ(s.matrix.coeff(i1, i2), 0.5);
  EXPECT_DOUBLE_EQ(s.matrix.coeff(i2, i1), 1.0);
}

TEST(LinearSolve, IdentityReturnsRhs) {
  SparseSystem s;
  s.matrix.resize(4, 4);
  s.matrix.setIdentity();
  s.rhs = Eigen::Vector4d(1, -2, 3, 0.5);
  EXPECT_LE((linear_solve(s) - s.rhs).norm(), 1e-15);
}

TEST(LinearSolve, ManufacturedStiffnessSystem) {
  P1Problem p = unit_square(8);
  const Mesh& m = p.mesh;
  const std::vector<LocalKernel> k{[&](int c, LocalSystem& l) {
    const Simplex<2> s = cell_simplex<2>(m, m.nodes, c);
    l.jacobian = s.measure * s.grads * s.grads.transpose();
    for (int i = 0; i < 3; ++i) l.jacobian(i, i) += s.measure / 6.0;  // lumped mass makes it SPD
  }};
  Assembler a(p.dofs.num_dofs(), {p.group});
  SparseSystem s = a.assemble(k);
  std::mt19937 rng(3);
  std::normal_distribution<double> nd;
  Eigen::VectorXd x(m.num_nodes());
  for (auto& v : x) v = nd(rng);
  s.rhs = s.matrix * x;
  LinearSolver solver;
  const Eigen::VectorXd y = solver.solve(s);
  EXPECT_LE((y - x).norm(), 1e-9 * x.norm());
  EXPECT_LE(solver.last_relative_residual(), 1e-10);
}

TEST(LinearSolve, StructurallySingularThrows) {
  SparseSystem s;
  s.matrix.resize(3, 3);
  s.matrix.insert(0, 0) = 1.0;
  s.matrix.insert(1, 1) = 1.0;
  s.matrix.insert(2, 2) = 0.0;
  s.rhs = Eigen::Vector3d(1, 1, 1);
  EXPECT_THROW(linear_solve(s), LinearSolveError);
}

TEST(Newton, LinearProblemOneIteration) {
  Eigen::SparseMatrix<double> A(2, 2);
  A.insert(0, 0) = 3;
  A.insert(0, 1) = 1;
  A.insert(1, 0) = 1;
  A.insert(1, 1) = 2;
  const Eigen::Vector2d b(1, -1);
  const NewtonResult r = newton_solve([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(A * x - b); },
                                      [&](const Eigen::VectorXd&) { return A; },
                                      Eigen::Vector2d(10, 10), NewtonOptions{});
  EXPECT_EQ(r.report.iterations, 1);
  EXPECT_LE((A * r.solution - b).norm(), 1e-12);
}

TEST(Newton, ScalarRootQuadraticDecay) {
  auto res = [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, x(0) * x(0) - 4.0); };
  auto jac = [](const Eigen::VectorXd& x) {
    Eigen::SparseMatrix<double> J(1, 1);
    J.insert(0, 0) = 2.0 * x(0);
    return J;
  };
  NewtonOptions opt;
  opt.abs_tol = 1e-14;
  opt.rel_tol = 1e-14;
  const NewtonResult r = newton_solve(res, jac, Eigen::VectorXd::Constant(1, 3.0), opt);
  EXPECT_NEAR(r.solution(0), 2.0, 1e-12);
  const auto& h = r.report.residual_history;
  ASSERT_GE(h.size(), 4u);
  // Quadratic decay: r_{k+1} <= C r_k^2.
  for (std::size_t k = 1; k + 1 < h.size() && h[k + 1] > 1e-13; ++k) EXPECT_LE(h[k + 1], 0.5 * h[k] * h[k]);
}

TEST(Newton, NonFiniteResidualThrows) {
  auto res = [](const Eigen::VectorXd&) {
    return Eigen::VectorXd::Constant(1, std::numeric_limits<double>::quiet_NaN());
  };
  auto jac = [](const Eigen::VectorXd&) {
    Eigen::SparseMatrix<double> J(1, 1);
    J.insert(0, 0) = 1.0;
    return J;
  };
  EXPECT_THROW(newton_solve(res, jac, Eigen::VectorXd::Zero(1), NewtonOptions{}), NonconvergenceError);
}

TEST(Newton, IterationCapThrowsWithHistory) {
  auto res = [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, std::atan(x(0))); };
  auto jac = [](const Eigen::VectorXd& x) {
    Eigen::SparseMatrix<double> J(1, 1);
    J.insert(0, 0) = 1.0 / (1.0 + x(0) * x(0));
    return J;
  };
  NewtonOptions opt;
  opt.max_iter = 3;
  try {
    newton_solve(res, jac, Eigen::VectorXd::Constant(1, 1.5), opt);  // diverges from |x| > 1.39
    FAIL() << "expected NonconvergenceError";
  } catch (const NonconvergenceError& e) {
    EXPECT_EQ(e.history().size(), 4u);
  }
}
