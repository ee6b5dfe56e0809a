#include <benchmark/benchmark.h>

#include "riisfsi/config.hpp"
#include "riisfsi/coupled.hpp"
#include "riisfsi/fluid.hpp"
#include "riisfsi/mesh.hpp"
#include "riisfsi/riis.hpp"
#include "riisfsi/solid.hpp"

using namespace riisfsi;

namespace {

const MeshPair& annulus(double h) {
  static const MeshPair fine = generate_annulus_benchmark(0.025, 0.005, 1e-3);
  static const MeshPair coarse = generate_annulus_benchmark(0.025, 0.005, 2e-3);
  return h < 1.5e-3 ? fine : coarse;
}

ValveSurface benchmark_valve() { return make_straight_valve("valve", {-0.028, 0.0}, {0.028, 0.0}, 56); }

}  // namespace

static void BM_DeltaSupport(benchmark::State& state) {
  const MeshPair& m = annulus(1e-3);
  const ValveSurface v = benchmark_valve();
  const Polyline p = v.reference_geometry();
  DeltaQuadratureOptions opt;
  opt.subdivision = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(delta_support(m.fluid, m.fluid.nodes, p, v.half_thickness, opt));
}
BENCHMARK(BM_DeltaSupport)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_FluidOperator(benchmark::State& state) {
  const MeshPair& m = annulus(1e-3);
  const ValveSurface v = benchmark_valve();
  const DeltaSupport sup = delta_support(m.fluid, m.fluid.nodes, v.reference_geometry(), v.half_thickness);
  FluidStepInput in;
  in.coords = m.fluid.nodes;
  in.dt = 5e-4;
  in.valves.push_back({&sup, v.resistance / v.half_thickness});
  for (auto _ : state) benchmark::DoNotOptimize(FluidOperator(m.fluid, FluidParams{}, in));
}
BENCHMARK(BM_FluidOperator)->Unit(benchmark::kMillisecond);

static void BM_SolidResidualAndJacobian(benchmark::State& state) {
  const MeshPair& m = annulus(1e-3);
  SolidStepInput in;
  in.dt = 5e-4;
  in.time = 0.1;
  in.fibers = circumferential_fibers(m.solid);
  const SolidOperator op(m.solid, SolidParams{}, in);
  const NodalField d(m.solid.num_nodes(), 2);
  LocalSystem local;
  for (auto _ : state)
    for (int c = 0; c < m.solid.num_cells(); ++c) {
      op.cell_system(c, d, local);
      benchmark::DoNotOptimize(local.residual.data());
    }
}
BENCHMARK(BM_SolidResidualAndJacobian)->Unit(benchmark::kMillisecond);

static void BM_MeshMotion(benchmark::State& state) {
  const MeshPair& m = annulus(1e-3);
  const MeshMotion motion(m);
  NodalField d(m.solid.num_nodes(), 2);
  d.values.col(1).setConstant(1e-4);
  for (auto _ : state) benchmark::DoNotOptimize(motion.extend(d));
}
BENCHMARK(BM_MeshMotion)->Unit(benchmark::kMillisecond);

static void BM_CoupledStep(benchmark::State& state) {
  SimConfig c = default_config("annulus");
  c.geometry.mesh_size = state.range(0) * 1e-3;
  FsiSolver solver(c);
  FsiState s = solver.initial_state();
  solver.step(s);
  for (auto _ : state) {
    FsiState copy = s;
    benchmark::DoNotOptimize(solver.step(copy));
  }
}
BENCHMARK(BM_CoupledStep)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
