#include "relaxdamp/dynamics.hpp"
#include "relaxdamp/eigenframe.hpp"
#include "relaxdamp/model.hpp"
#include "relaxdamp/profile.hpp"
#include "relaxdamp/spectral.hpp"

#include <benchmark/benchmark.h>

using namespace relaxdamp;

namespace {

const ModelSpec& model() {
  static const ModelSpec m = build_jinxin(2.0, 1.0, {0.0, 0.0, 0.5}, 1.0, -1.0);
  return m;
}

const ProfileRep& profile() {
  static const ProfileRep p = exact_jinxin_profile(model(), Grid::with_spacing(40.0, 0.02));
  return p;
}

Field gaussian_field(const Grid& g) {
  Field u = Field::Zero(2, g.n);
  for (int i = 0; i < g.n; ++i) u(0, i) = 1e-2 * std::exp(-g.x(i) * g.x(i) / 8.0);
  return u;
}

void BM_StepMoc(benchmark::State& state) {
  const Dynamics dyn(model(), profile(), ShiftSpec::zero());
  Field u = gaussian_field(dyn.grid());
  const double dt = 0.45 * dyn.grid().dx / 2.0;
  double t = 0.0;
  for (auto _ : state) {
    dyn.step_moc(u, t, dt);
    t += dt;
  }
  state.SetItemsProcessed(state.iterations() * dyn.grid().n);
}
BENCHMARK(BM_StepMoc)->Unit(benchmark::kMillisecond);

void BM_StepReference(benchmark::State& state) {
  const Dynamics dyn(model(), profile(), ShiftSpec::zero());
  Field u = gaussian_field(dyn.grid());
  const double dt = 0.45 * dyn.grid().dx / 2.0;
  double t = 0.0;
  for (auto _ : state) {
    dyn.step_reference(u, t, dt);
    t += dt;
  }
  state.SetItemsProcessed(state.iterations() * dyn.grid().n);
}
BENCHMARK(BM_StepReference)->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& state) {
  Mat a(2, 2);
  a << 0.3, 1.0, 4.0, -0.2;
  for (auto _ : state) benchmark::DoNotOptimize(decompose(a));
}
BENCHMARK(BM_Decompose);

void BM_SymbolSpectrum(benchmark::State& state) {
  double xi = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(symbol_spectrum(model(), Side::Plus, xi));
    xi = xi < 100.0 ? xi * 1.01 : 0.01;
  }
}
BENCHMARK(BM_SymbolSpectrum);

void BM_SolveProfile(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve_profile(model(), 40.0, static_cast<int>(state.range(0)), 1e-8));
}
BENCHMARK(BM_SolveProfile)->Arg(1001)->Arg(4001)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
