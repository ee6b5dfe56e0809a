#include "riisfsi/linear_solver.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include "riisfsi/errors.hpp"

namespace riisfsi {

struct LinearSolver::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  Eigen::SparseMatrix<double> original;
  Eigen::SparseMatrix<double> scaled;
  Eigen::VectorXd row_scale;
  Eigen::VectorXd col_scale;
  Eigen::Index pattern_nnz = -1;
  Eigen::Index pattern_rows = -1;
};

LinearSolver::LinearSolver(LinearSolverOptions options)
    : impl_(std::make_unique<Impl>()), options_(options) {}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

void LinearSolver::factorize(const Eigen::SparseMatrix<double>& matrix) {
  if (matrix.rows() != matrix.cols()) throw LinearSolveError("matrix is not square");
  auto& m = *impl_;
  m.original = matrix;
  m.original.makeCompressed();
  const auto n = matrix.rows();
  m.row_scale = Eigen::VectorXd::Ones(n);
  m.col_scale = Eigen::VectorXd::Ones(n);
  m.scaled = m.original;
  if (options_.equilibrate) {
    Eigen::VectorXd rmax = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < m.scaled.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(m.scaled, k); it; ++it)
        rmax(it.row()) = std::max(rmax(it.row()), std::abs(it.value()));
    for (Eigen::Index i = 0; i < n; ++i) m.row_scale(i) = rmax(i) > 0 ? 1.0 / rmax(i) : 1.0;
    for (int k = 0; k < m.scaled.outerSize(); ++k) {
      double cmax = 0.0;
      for (Eigen::SparseMatrix<double>::InnerIterator it(m.scaled, k); it; ++it)
        cmax = std::max(cmax, std::abs(it.value() * m.row_scale(it.row())));
      m.col_scale(k) = cmax > 0 ? 1.0 / cmax : 1.0;
      for (Eigen::SparseMatrix<double>::InnerIterator it(m.scaled, k); it; ++it)
        it.valueRef() *= m.row_scale(it.row()) * m.col_scale(k);
    }
  }
  if (m.pattern_nnz != m.scaled.nonZeros() || m.pattern_rows != n) {
    m.lu.analyzePattern(m.scaled);
    m.pattern_nnz = m.scaled.nonZeros();
    m.pattern_rows = n;
  }
  m.lu.factorize(m.scaled);
  if (m.lu.info() != Eigen::Success) {
    m.pattern_nnz = -1;
    throw LinearSolveError("sparse LU factorization failed: " + m.lu.lastErrorMessage());
  }
}

Eigen::VectorXd LinearSolver::solve_factored(const Eigen::VectorXd& rhs) const {
  const auto& m = *impl_;
  auto apply = [&](const Eigen::VectorXd& b) -> Eigen::VectorXd {
    Eigen::VectorXd y = m.lu.solve((m.row_scale.array() * b.array()).matrix());
    return (m.col_scale.array() * y.array()).matrix();
  };
  Eigen::VectorXd x = apply(rhs);
  const double bnorm = rhs.norm();
  auto rel = [&](const Eigen::VectorXd& r) { return bnorm > 0 ? r.norm() / bnorm : r.norm(); };
  Eigen::VectorXd r = rhs - m.original * x;
  for (int k = 0; k < options_.refinement_steps && rel(r) > options_.residual_tol; ++k) {
    x += apply(r);
    r = rhs - m.original * x;
  }
  last_residual_ = rel(r);
  if (!x.allFinite() || last_residual_ > options_.residual_tol) {
    std::ostringstream os;
    os << "linear solve inaccurate: relative residual " << last_residual_ << " > "
       << options_.residual_tol << " (ill-conditioned or singular matrix)";
    throw LinearSolveError(os.str());
  }
  return x;
}

Eigen::VectorXd LinearSolver::solve(const Eigen::SparseMatrix<double>& matrix,
                                    const Eigen::VectorXd& rhs) {
  if (matrix.rows() != rhs.size()) throw LinearSolveError("matrix and rhs sizes differ");
  factorize(matrix);
  return solve_factored(rhs);
}

Eigen::VectorXd LinearSolver::solve(const SparseSystem& system) {
  return solve(system.matrix, system.rhs);
}

Eigen::VectorXd linear_solve(const SparseSystem& system) {
  LinearSolver solver;
  return solver.solve(system);
}

}  // namespace riisfsi
