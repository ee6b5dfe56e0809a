#pragma once

#include <functional>
#include <string>
#include <vector>

#include "riisfsi/config.hpp"
#include "riisfsi/coupled.hpp"

namespace riisfsi {

struct StudyRun {
  double dt = 0.0;
  double drift = 0.0;  // |y_com(T) - y_com(0)|
  bool failed = false;
  std::string failure;
};

struct StudyResult {
  double order = 0.0;  // least-squares slope of log drift against log dt
  std::vector<StudyRun> runs;
  bool failed = false;
};

/// Least-squares slope of log(y) against log(x). Throws ParameterError for
/// fewer than two points or non-positive values.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Runs the configuration once per time step and fits the drift order.
/// Requires at least three distinct time steps and the attachment force on.
/// A failed run stops the study; completed runs are kept.
StudyResult convergence_study(
    const SimConfig& config, const std::vector<double>& dts,
    const std::function<void(const SimConfig&, const Trajectory&)>& on_run = {});

}  // namespace riisfsi
