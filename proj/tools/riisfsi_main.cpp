#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "riisfsi/config.hpp"
#include "riisfsi/coupled.hpp"
#include "riisfsi/errors.hpp"
#include "riisfsi/output.hpp"
#include "riisfsi/study.hpp"

namespace {

using namespace riisfsi;

int run_single(const SimConfig& config) {
  OutputWriter writer(config);
  writer.begin();
  RunCallbacks callbacks;
  callbacks.on_state = [&](const FsiSolver& s, const FsiState& st) { writer.on_state(s, st); };
  const Trajectory t = run_simulation(config, callbacks);
  writer.finish(t);
  if (!t.rows.empty()) {
    const auto& last = t.rows.back();
    std::cout << std::setprecision(6) << "t = " << last.time << " s, center of mass = ("
              << last.center_of_mass.x() << ", " << last.center_of_mass.y() << ") m, "
              << t.reports.size() << " steps in " << t.wall_seconds << " s\n";
  }
  std::cout << "outputs written to " << writer.directory() << "\n";
  if (t.failed) {
    std::cerr << "error (" << to_string(t.failure_category) << "): " << t.failure << "\n";
    return static_cast<int>(t.failure_category);
  }
  return 0;
}

int run_study(const SimConfig& config) {
  std::filesystem::create_directories(config.output_dir);
  auto on_run = [&](const SimConfig& c, const Trajectory& t) {
    std::ostringstream name;
    name << "dt_" << c.dt;
    SimConfig sub = c;
    sub.output_dir = (std::filesystem::path(config.output_dir) / name.str()).string();
    OutputWriter writer(sub);
    writer.begin();
    writer.finish(t);
    std::cout << "dt = " << c.dt << " s: " << (t.failed ? "failed" : "done") << " in "
              << t.wall_seconds << " s\n";
  };
  const StudyResult r = convergence_study(config, config.convergence_dts, on_run);
  const auto path = std::filesystem::path(config.output_dir) / "study.csv";
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "dt,drift\n" << std::setprecision(17);
  for (const auto& run : r.runs) out << run.dt << ',' << run.drift << '\n';
  for (const auto& run : r.runs)
    std::cout << "dt = " << run.dt << " s  |z(T)| = " << run.drift << " m\n";
  if (r.failed) {
    std::cerr << "error: convergence study aborted: " << r.runs.back().failure << "\n";
    return static_cast<int>(ErrorCategory::nonconvergence);
  }
  std::cout << "fitted order = " << r.order << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled fluid-structure simulations with resistive immersed valves"};
  std::string config_path, output_dir, scenario = "annulus";
  std::optional<double> dt, final_time;
  std::optional<int> snapshot_every;
  bool no_attachment = false, study = false, print_config = false;
  app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--scenario", scenario, "Built-in scenario used when no config is given")
      ->check(CLI::IsMember({"annulus", "channel"}));
  app.add_option("--output-dir", output_dir, "Directory for CSV, VTK and manifest output");
  app.add_flag("--no-attachment-force", no_attachment, "Disable the valve attachment load");
  app.add_option("--dt", dt, "Time step [s]");
  app.add_option("--final-time", final_time, "Final time [s]");
  app.add_flag("--convergence-study", study, "Run the drift convergence study over convergence_dts");
  app.add_option("--snapshot-every", snapshot_every, "Steps between VTK snapshots (0: none)");
  app.add_flag("--print-config", print_config, "Print the effective configuration and exit");
  CLI11_PARSE(app, argc, argv);

  try {
    SimConfig config = config_path.empty() ? default_config(scenario) : load_config(config_path);
    if (!output_dir.empty()) config.output_dir = output_dir;
    if (no_attachment) config.attachment_force = false;
    if (dt) config.dt = *dt;
    if (final_time) config.final_time = *final_time;
    if (snapshot_every) config.snapshot_every = *snapshot_every;
    check_config(config);
    if (print_config) {
      std::cout << serialize(config);
      return 0;
    }
    return study ? run_study(config) : run_single(config);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.category()) << "): " << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
