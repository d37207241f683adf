#include <benchmark/benchmark.h>

#include "substrat/bernoulli.hpp"
#include "substrat/group.hpp"
#include "substrat/group_io.hpp"
#include "substrat/mehler.hpp"
#include "substrat/multiplier.hpp"
#include "substrat/oscillatory.hpp"
#include "substrat/phase.hpp"
#include "substrat/spectral.hpp"

using namespace substrat;

namespace {

Vec ramp(int n, double scale) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * (0.3 + 0.17 * i) * (i % 2 ? -1.0 : 1.0);
  return v;
}

void BM_Decompose(benchmark::State& state, const char* name) {
  const StratifiedGroup g = builtin_group(name);
  const DualVector mu(ramp(g.d2(), 0.7));
  for (auto _ : state) benchmark::DoNotOptimize(decompose(g, mu));
}
BENCHMARK_CAPTURE(BM_Decompose, heisenberg, "heisenberg:1");
BENCHMARK_CAPTURE(BM_Decompose, htype_8_7, "htype:8,7");
BENCHMARK_CAPTURE(BM_Decompose, free2step_3, "free2step:3");

void BM_HeatPartialFt(benchmark::State& state) {
  const StratifiedGroup g = builtin_group("htype:4,3");
  const HeatQuery q{Complex(1.0, 0.3), DualVector(ramp(3, 0.5)), ramp(4, 1.0)};
  for (auto _ : state) benchmark::DoNotOptimize(heat_partial_ft(g, q));
}
BENCHMARK(BM_HeatPartialFt);

void BM_HeatSpaceHeisenberg(benchmark::State& state) {
  const StratifiedGroup g = heisenberg(1);
  const Vec x = ramp(2, 0.5);
  const Vec u = ramp(1, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(heat_space(g, 1.0, x, u));
}
BENCHMARK(BM_HeatSpaceHeisenberg)->Unit(benchmark::kMillisecond);

void BM_HankelDet(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hankel_det(1, s));
}
BENCHMARK(BM_HankelDet)->Arg(2)->Arg(4)->Arg(8);

void BM_KernelFt(benchmark::State& state, const char* name) {
  const StratifiedGroup g = builtin_group(name);
  const MultiplierSpec F = MultiplierSpec::heatcap(1.0, 40.0);
  const Vec xi = ramp(g.d1(), 0.4);
  const DualVector mu(ramp(g.d2(), 0.3));
  for (auto _ : state) benchmark::DoNotOptimize(kernel_ft(g, F, xi, mu));
}
BENCHMARK_CAPTURE(BM_KernelFt, heisenberg, "heisenberg:1");
BENCHMARK_CAPTURE(BM_KernelFt, free2step_3, "free2step:3");
BENCHMARK_CAPTURE(BM_KernelFt, rotfam_1_2, "rotfam:1,2");

void BM_Omega(benchmark::State& state) {
  const StratifiedGroup g = heisenberg(1);
  const CriticalPointCertificate cert = find_critical(g, 1);
  const CutoffSpec chi = choose_chi(g, cert);
  const CutoffSpec theta = choose_theta(g, cert);
  const double t = static_cast<double>(state.range(0));
  OmegaGrid grid;
  grid.tolerance = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(omega(g, {t, cert.y0, cert.v0, chi, theta, grid}));
  }
}
BENCHMARK(BM_Omega)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
