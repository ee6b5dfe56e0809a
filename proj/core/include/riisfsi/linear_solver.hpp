#pragma once

#include <memory>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "riisfsi/assembly.hpp"

namespace riisfsi {

struct LinearSolverOptions {
  /// Accept the solution when ||A x - b|| <= residual_tol * ||b||.
  double residual_tol = 1e-10;
  /// Row/column max-norm equilibration before factorization.
  bool equilibrate = true;
  int refinement_steps = 2;
};

/// Sparse direct LU solver. The symbolic analysis is computed on the first
/// call and reused while the sparsity pattern stays the same.
class LinearSolver {
 public:
  explicit LinearSolver(LinearSolverOptions options = {});
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  /// Throws LinearSolveError on a singular factorization or when the residual
  /// check fails after refinement.
  Eigen::VectorXd solve(const SparseSystem& system);
  Eigen::VectorXd solve(const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& rhs);

  /// Factorize once, then solve for several right-hand sides.
  void factorize(const Eigen::SparseMatrix<double>& matrix);
  Eigen::VectorXd solve_factored(const Eigen::VectorXd& rhs) const;

  double last_relative_residual() const { return last_residual_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  LinearSolverOptions options_;
  mutable double last_residual_ = 0.0;
};

/// One-shot convenience wrapper.
Eigen::VectorXd linear_solve(const SparseSystem& system);

}  // namespace riisfsi
