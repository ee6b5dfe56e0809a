#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "riisfsi/assembly.hpp"
#include "riisfsi/linear_solver.hpp"

namespace riisfsi {

struct NewtonOptions {
  double abs_tol = 1e-8;
  double rel_tol = 1e-6;
  int max_iter = 20;
};

struct NewtonReport {
  int iterations = 0;
  std::vector<double> residual_history;  // ||R|| before the first update, then after each
  double linear_solve_seconds = 0.0;
  double assembly_seconds = 0.0;
};

/// Evaluates the system at x: system.rhs = -R(x) and, when requested, the Jacobian.
using SystemFunction =
    std::function<void(const Eigen::VectorXd& x, SparseSystem& system, bool with_jacobian)>;

/// Newton iteration on an assembled system. Always performs at least one
/// update; stops once ||R|| <= max(abs_tol, rel_tol * ||R(x0)||). The solution
/// is written back into `x`.
NewtonReport newton_solve(const SystemFunction& system_fn, Eigen::VectorXd& x,
                          const NewtonOptions& options, LinearSolver& solver);

using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFunction = std::function<Eigen::SparseMatrix<double>(const Eigen::VectorXd&)>;

struct NewtonResult {
  Eigen::VectorXd solution;
  NewtonReport report;
};

/// Separate residual/Jacobian callbacks; convenient for small problems.
NewtonResult newton_solve(const ResidualFunction& residual, const JacobianFunction& jacobian,
                          const Eigen::VectorXd& initial_guess, const NewtonOptions& options);

}  // namespace riisfsi
