#include "riisfsi/newton.hpp"

#include <chrono>
#include <sstream>

#include "riisfsi/errors.hpp"

namespace riisfsi {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void require_finite(const SparseSystem& system, const std::vector<double>& history) {
  if (!system.rhs.allFinite())
    throw NonconvergenceError("Newton: residual is not finite", history);
}

}  // namespace

NewtonReport newton_solve(const SystemFunction& system_fn, Eigen::VectorXd& x,
                          const NewtonOptions& options, LinearSolver& solver) {
  NewtonReport report;
  SparseSystem system;
  auto t0 = std::chrono::steady_clock::now();
  system_fn(x, system, true);
  report.assembly_seconds += seconds_since(t0);
  require_finite(system, report.residual_history);
  const double r0 = system.rhs.norm();
  report.residual_history.push_back(r0);
  const double tol = std::max(options.abs_tol, options.rel_tol * r0);

  for (int k = 1; k <= options.max_iter; ++k) {
    t0 = std::chrono::steady_clock::now();
    const Eigen::VectorXd dx = solver.solve(system);
    report.linear_solve_seconds += seconds_since(t0);
    x += dx;

    t0 = std::chrono::steady_clock::now();
    system_fn(x, system, true);
    report.assembly_seconds += seconds_since(t0);
    require_finite(system, report.residual_history);
    const double r = system.rhs.norm();
    report.residual_history.push_back(r);
    report.iterations = k;
    if (r <= tol) return report;
  }
  std::ostringstream os;
  os << "Newton did not converge in " << options.max_iter << " iterations (||R|| = "
     << report.residual_history.back() << ", tol = " << tol << ")";
  throw NonconvergenceError(os.str(), report.residual_history);
}

NewtonResult newton_solve(const ResidualFunction& residual, const JacobianFunction& jacobian,
                          const Eigen::VectorXd& initial_guess, const NewtonOptions& options) {
  NewtonResult result;
  result.solution = initial_guess;
  LinearSolver solver;
  auto fn = [&](const Eigen::VectorXd& x, SparseSystem& system, bool with_jacobian) {
    system.rhs = -residual(x);
    if (with_jacobian && system.rhs.allFinite()) system.matrix = jacobian(x);
  };
  result.report = newton_solve(fn, result.solution, options, solver);
  return result;
}

}  // namespace riisfsi
