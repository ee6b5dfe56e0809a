#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "riisfsi/config.hpp"
#include "riisfsi/coupled.hpp"
#include "riisfsi/diagnostics.hpp"
#include "riisfsi/errors.hpp"
#include "riisfsi/output.hpp"
#include "riisfsi/study.hpp"

using namespace riisfsi;
using Eigen::Vector2d;
namespace fs = std::filesystem;

namespace {

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + v[k];
  return s;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("riisfsi_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, RoundTripPreservesEverything) {
  SimConfig c = default_config("channel");
  c.dt = 2.5e-4;
  c.attachment_force = false;
  c.scenario_valve_params.mode = ValveMode::pressure_driven;
  c.valves.push_back(make_straight_valve("extra", {0.01, -0.002}, {0.01, 0.012}, 5));
  c.convergence_dts = {1e-3, 5e-4, 2.5e-4, 1.25e-4};
  const std::string text = serialize(c);
  const SimConfig back = parse_config(text);
  EXPECT_EQ(serialize(back), text);
  EXPECT_EQ(config_digest(back), config_digest(c));
  EXPECT_EQ(back.valves.size(), 1u);
  EXPECT_EQ(back.scenario_valve_params.mode, ValveMode::pressure_driven);
  EXPECT_FALSE(back.attachment_force);
}

TEST(Config, DigestTracksContent) {
  const SimConfig a = default_config();
  SimConfig b = a;
  EXPECT_EQ(config_digest(a), config_digest(b));
  b.solid.active_max = 4999.0;
  EXPECT_NE(config_digest(a), config_digest(b));
  EXPECT_EQ(digest_hex(0x1234abcdULL), "000000001234abcd");
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_config(R"({"dtt": 0.001})"), ParameterError);
  EXPECT_THROW(parse_config(R"({"attachment_force": "maybe"})"), ParameterError);
  EXPECT_THROW(parse_config("{not json"), ParameterError);
  SimConfig c = default_config();
  c.geometry.valve_penetration = c.geometry.wall_thickness;
  EXPECT_THROW(check_config(c), ParameterError);
  c = default_config();
  c.final_time = -1.0;
  EXPECT_THROW(check_config(c), ParameterError);
  EXPECT_THROW(default_config("sphere"), ParameterError);
  EXPECT_THROW(load_config("/nonexistent/riisfsi.json"), IoError);
}

TEST(Config, DefaultValveSpansTheFluidIntoTheWall) {
  const SimConfig c = default_config();
  const auto valves = resolve_valves(c);
  ASSERT_EQ(valves.size(), 1u);
  const Polyline p = valves.front().reference_geometry();
  EXPECT_NEAR(p.length(), 2 * (c.geometry.fluid_radius + c.geometry.valve_penetration), 1e-15);
  EXPECT_LE(p.length() / p.num_segments(), c.geometry.mesh_size);
}

TEST(Output, CsvHeaders) {
  EXPECT_EQ(join(diagnostics_columns({"mitral"})),
            "t,com_x,com_y,com_velocity_y,pressure_jump,mitral_force_x,mitral_force_y,"
            "mitral_volume,mitral_force_density,residual_torque,lower_chamber_area,max_velocity");
  EXPECT_EQ(join(timings_columns()),
            "step,t,newton_iterations,total,linear_solve,fluid_assembly,solid_assembly,compute_g,"
            "mesh_motion,final_residual");
  Trajectory empty;
  empty.valve_names = {"v"};
  std::ostringstream d, t;
  write_diagnostics_csv(empty, d);
  write_timings_csv(empty, t);
  EXPECT_EQ(d.str(), join(diagnostics_columns({"v"})) + "\n");
  EXPECT_EQ(t.str(), join(timings_columns()) + "\n");
}

TEST(Output, VtkIsWellFormed) {
  SimConfig c = default_config();
  c.geometry.mesh_size = 4e-3;
  FsiSolver solver(c);
  FsiState s = solver.initial_state();
  s.u.values.col(1).setConstant(0.25);
  std::ostringstream out;
  write_fluid_vtk(solver.meshes(), s, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# vtk DataFile Version 3.0");
  std::string word;
  long points = -1, cells = -1, size = -1;
  while (in >> word) {
    if (word == "POINTS") {
      in >> points >> word;
      for (long k = 0; k < 3 * points; ++k) {
        double v;
        ASSERT_TRUE(in >> v);
      }
    } else if (word == "CELLS") {
      in >> cells >> size;
    } else if (word == "VECTORS") {
      in >> word;
      if (word == "u") {
        in >> word;
        double ux, uy, uz;
        in >> ux >> uy >> uz;
        EXPECT_EQ(uy, 0.25);
      }
    }
  }
  EXPECT_EQ(points, solver.meshes().fluid.num_nodes());
  EXPECT_EQ(cells, solver.meshes().fluid.num_cells());
  EXPECT_EQ(size, 4 * cells);
}

TEST(Diagnostics, CenterOfMassSymmetryAndTranslation) {
  const MeshPair m = generate_annulus_benchmark(0.025, 0.005, 2e-3);
  const Eigen::MatrixXd xf = m.fluid.nodes, xs = m.solid.nodes;
  const Vector2d c0 = center_of_mass(m, xf, xs, 1060.0, 1000.0);
  EXPECT_LE(c0.norm(), 1e-17);
  Eigen::MatrixXd yf = xf, ys = xs;
  yf.rowwise() += Eigen::RowVector2d(0.003, -0.002);
  ys.rowwise() += Eigen::RowVector2d(0.003, -0.002);
  EXPECT_LE((center_of_mass(m, yf, ys, 1060.0, 1000.0) - Vector2d(0.003, -0.002)).norm(), 1e-15);
  const Mesh r = generate_rectangle(-1.0, -1.0, 1.0, 1.0, 7, 9);
  EXPECT_NEAR(lower_region_area(r, r.nodes), 2.0, 1e-14);
  EXPECT_NEAR(lower_region_area(r, r.nodes, 0.25), 2.5, 1e-14);
  EXPECT_NEAR(lower_region_area(r, 2.0 * r.nodes), 8.0, 1e-13);
}

TEST(Diagnostics, ChamberPressureJumpOfPiecewiseConstantField) {
  const Mesh m = generate_rectangle(-1.0, -1.0, 1.0, 1.0, 20, 20);
  NodalField p(m.num_nodes(), 1);
  for (int n = 0; n < m.num_nodes(); ++n) p(n, 0) = m.nodes(n, 1) < 0.0 ? 1.0 : (m.nodes(n, 1) > 0.0 ? 5.0 : 3.0);
  const Polyline valve{{{-2.0, 0.0}, {2.0, 0.0}}};
  EXPECT_NEAR(chamber_pressure_jump(m, m.nodes, p, valve, 0.1, -1), -4.0, 1e-12);
  EXPECT_NEAR(chamber_pressure_jump(m, m.nodes, p, valve, 0.1, +1), 4.0, 1e-12);
  const Polyline outside{{{-2.0, 3.0}, {2.0, 3.0}}};
  EXPECT_THROW(chamber_pressure_jump(m, m.nodes, p, outside, 0.1, -1), ParameterError);
}

TEST(Study, LogLogSlope) {
  EXPECT_NEAR(log_log_slope({1e-3, 5e-4, 2.5e-4}, {3e-3, 1.0607e-3, 3.75e-4}), 1.5, 1e-4);
  EXPECT_NEAR(log_log_slope({1, 2, 4, 8}, {5, 5, 5, 5}), 0.0, 1e-15);
  EXPECT_THROW(log_log_slope({1.0}, {1.0}), ParameterError);
  EXPECT_THROW(log_log_slope({1.0, 2.0}, {1.0, 0.0}), ParameterError);
}

TEST(Study, Preconditions) {
  SimConfig c = default_config();
  EXPECT_THROW(convergence_study(c, {1e-3, 5e-4}), ParameterError);
  EXPECT_THROW(convergence_study(c, {1e-3, 1e-3, 5e-4}), ParameterError);
  c.attachment_force = false;
  EXPECT_THROW(convergence_study(c, {1e-3, 5e-4, 2.5e-4}), ParameterError);
}

TEST(Writer, ManifestAndCsvFiles) {
  SimConfig c = default_config();
  c.geometry.mesh_size = 3e-3;
  c.final_time = 2e-3;
  c.snapshot_every = 2;
  c.output_dir = scratch_dir("writer").string();
  OutputWriter w(c);
  w.begin();
  RunCallbacks cb;
  cb.on_state = [&](const FsiSolver& s, const FsiState& st) { w.on_state(s, st); };
  const Trajectory t = run_simulation(c, cb);
  w.finish(t);
  const fs::path dir(c.output_dir);
  for (const char* f : {"config.json", "diagnostics.csv", "timings.csv", "manifest.json",
                        "fluid_000000.vtk", "solid_000002.vtk", "fluid_000004.vtk"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const auto manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  EXPECT_EQ(manifest["status"], "completed");
  EXPECT_EQ(manifest["steps"], 4);
  EXPECT_EQ(manifest["config_digest"], digest_hex(config_digest(c)));
  EXPECT_EQ(load_config((dir / "config.json").string()).dt, c.dt);
  const std::string csv = read_file(dir / "diagnostics.csv");
  EXPECT_EQ(first_line(csv), join(diagnostics_columns({"valve"})));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  fs::remove_all(dir);
}

#ifdef RIISFSI_CLI_PATH
namespace {
int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(RIISFSI_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
}  // namespace

TEST(Cli, PrintConfigIsParseable) {
  const fs::path log = scratch_dir("cli_print");
  EXPECT_EQ(run_cli("--scenario channel --dt 0.001 --print-config", log), 0);
  const SimConfig c = parse_config(read_file(log));
  EXPECT_EQ(c.geometry.scenario, "channel");
  EXPECT_EQ(c.dt, 1e-3);
  fs::remove(log);
}

TEST(Cli, ExitCodesFollowErrorCategories) {
  const fs::path dir = scratch_dir("cli_codes");
  fs::create_directories(dir);
  EXPECT_EQ(run_cli("--dt -1 --print-config", dir / "a.log"), static_cast<int>(ErrorCategory::parameter));
  std::ofstream(dir / "bad.json") << R"({"unknown_key": 1})";
  EXPECT_EQ(run_cli("--config " + (dir / "bad.json").string(), dir / "b.log"),
            static_cast<int>(ErrorCategory::parameter));
  EXPECT_NE(run_cli("--config " + (dir / "missing.json").string(), dir / "c.log"), 0);
  fs::remove_all(dir);
}

TEST(Cli, ShortRunWritesOutputs) {
  const fs::path dir = scratch_dir("cli_run");
  fs::create_directories(dir);
  SimConfig c = default_config();
  c.geometry.mesh_size = 3e-3;
  c.final_time = 1e-3;
  save_config(c, (dir / "in.json").string());
  EXPECT_EQ(run_cli("--config " + (dir / "in.json").string() + " --output-dir " + (dir / "out").string(),
                    dir / "run.log"),
            0);
  EXPECT_TRUE(fs::exists(dir / "out" / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "out" / "timings.csv"));
  fs::remove_all(dir);
}
#endif
