#include "riisfsi/study.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "riisfsi/errors.hpp"

namespace riisfsi {

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("slope fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw ParameterError("slope fit needs positive values");
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) throw ParameterError("slope fit needs distinct abscissae");
  return (n * sxy - sx * sy) / den;
}

StudyResult convergence_study(const SimConfig& config, const std::vector<double>& dts,
                              const std::function<void(const SimConfig&, const Trajectory&)>& on_run) {
  if (std::set<double>(dts.begin(), dts.end()).size() < 3)
    throw ParameterError("convergence study needs at least three distinct time steps");
  if (!config.attachment_force)
    throw ParameterError("convergence study requires the attachment force");
  StudyResult result;
  std::vector<double> x, y;
  for (double dt : dts) {
    SimConfig c = config;
    c.dt = dt;
    StudyRun run;
    run.dt = dt;
    const Trajectory t = run_simulation(c);
    if (on_run) on_run(c, t);
    if (t.failed || t.rows.empty()) {
      run.failed = true;
      run.failure = t.failed ? t.failure : "no steps taken";
      result.runs.push_back(run);
      result.failed = true;
      return result;
    }
    run.drift = std::abs(t.rows.back().center_of_mass.y() - t.initial.center_of_mass.y());
    result.runs.push_back(run);
    x.push_back(dt);
    y.push_back(run.drift);
  }
  result.order = log_log_slope(x, y);
  return result;
}

}  // namespace riisfsi
