#include <benchmark/benchmark.h>

#include "hamflow/leaf.hpp"
#include "hamflow/verification.hpp"

using namespace hamflow;

namespace {

HolomorphicHamiltonian quartic() {
  const auto m = ModelDescriptor::flat(1);
  return extend(PolynomialHamiltonian(m, {Term{kI, {1}, {1}, 0}, Term{0.1 * kI, {2}, {2}, 0}}));
}

HolomorphicHamiltonian sphere_mixed() {
  return extend(sphere_moment(1) + kI * sphere_moment(3) +
                0.3 * (sphere_moment(1) * sphere_moment(2)));
}

}  // namespace

static void BM_PhiCold(benchmark::State& state) {
  const HolomorphicHamiltonian H = quartic();
  const KahlerPoint x = make_point(H.model(), cplx(0.3, 0.2));
  const SolverConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(phi(H, x, 0.2, cfg));
}
BENCHMARK(BM_PhiCold);

static void BM_PhiPath(benchmark::State& state) {
  const HolomorphicHamiltonian H = sphere_mixed();
  const KahlerPoint x = make_point(H.model(), cplx(0.3, -0.4));
  std::vector<double> times;
  for (int k = 1; k <= state.range(0); ++k) times.push_back(0.3 * k / state.range(0));
  const SolverConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(phi_path(H, x, times, cfg));
}
BENCHMARK(BM_PhiPath)->Arg(10)->Arg(30);

static void BM_Frame(benchmark::State& state) {
  const HolomorphicHamiltonian H = sphere_mixed();
  const SolverConfig cfg;
  const LeafSolution s = phi(H, make_point(H.model(), cplx(0.3, -0.4)), 0.2, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(frame(H, s, cfg));
}
BENCHMARK(BM_Frame);

static void BM_GeneratorResidual(benchmark::State& state) {
  const HolomorphicHamiltonian H = quartic();
  const KahlerPoint x = make_point(H.model(), cplx(0.3, 0.2));
  const SolverConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(generator_residual(H, x, 0.2, cfg));
}
BENCHMARK(BM_GeneratorResidual);

static void BM_HolomorphyResidual(benchmark::State& state) {
  const HolomorphicHamiltonian H = sphere_mixed();
  const KahlerPoint x = make_point(H.model(), cplx(0.3, -0.4));
  const SolverConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(holomorphy_residual(H, x, 0.2, cfg));
}
BENCHMARK(BM_HolomorphyResidual);
