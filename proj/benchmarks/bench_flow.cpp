#include <benchmark/benchmark.h>

#include "hamflow/flow.hpp"

using namespace hamflow;

namespace {

PolynomialHamiltonian cubic() {
  const auto m = ModelDescriptor::flat(1);
  return PolynomialHamiltonian(m, {Term{cplx(0.3, 0.7), {2}, {1}, 0},
                                   Term{cplx(0.3, -0.7), {1}, {2}, 0},
                                   Term{cplx(0, 0.5), {3}, {0}, 0}});
}

AmbientPoint start(const ModelDescriptor& m) {
  return embed(make_point(m, cplx(0.4, 0.2)));
}

}  // namespace

static void BM_FlowAdaptive(benchmark::State& state) {
  const HolomorphicHamiltonian H = extend(cubic());
  const AmbientPoint p = start(H.model());
  IntegratorConfig cfg;
  const bool jac = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(flow(H, p, 0.3, cfg, jac));
}
BENCHMARK(BM_FlowAdaptive)->Arg(0)->Arg(1);

static void BM_FlowRk4(benchmark::State& state) {
  const HolomorphicHamiltonian H = extend(cubic());
  const AmbientPoint p = start(H.model());
  IntegratorConfig cfg;
  cfg.method = Method::rk4_fixed;
  cfg.step = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(flow(H, p, 0.3, cfg, true));
}
BENCHMARK(BM_FlowRk4);

static void BM_FlowSphereChartSwitch(benchmark::State& state) {
  const auto m = ModelDescriptor::sphere();
  const HolomorphicHamiltonian H = extend(sphere_moment(1));
  const AmbientPoint p = embed(make_point(m, cplx(0.0, -0.6)));
  IntegratorConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(flow(H, p, 1.5, cfg, true));
}
BENCHMARK(BM_FlowSphereChartSwitch);

static void BM_XiJacobian(benchmark::State& state) {
  const HolomorphicHamiltonian H = extend(cubic());
  const AmbientPoint p = start(H.model());
  for (auto _ : state) benchmark::DoNotOptimize(xi_jacobian(H, p));
}
BENCHMARK(BM_XiJacobian);
