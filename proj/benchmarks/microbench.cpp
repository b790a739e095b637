#include <benchmark/benchmark.h>

#include "cise/expansion.hpp"
#include "cise/safety_filter.hpp"

namespace {

using namespace cise;

BoundaryState ellipse_boundary(int n) {
  InitDescriptor init;
  init.P = (Matrix2d() << 11.1, 0.0, 0.0, 100.0).finished();
  init.level = 1.0;
  init.n = n;
  return initial_boundary(init);
}

void BM_FlowMargin(benchmark::State& state) {
  const SystemModel sys = double_integrator();
  const Vector2d x(0.3, 0.4);
  const Vector2d n(0.6, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(b_star(sys, x, n));
}
BENCHMARK(BM_FlowMargin);

void BM_CertifySegment(benchmark::State& state) {
  const SystemModel sys = double_integrator();
  const BoundaryState boundary = ellipse_boundary(50);
  for (auto _ : state) benchmark::DoNotOptimize(certify_segment(sys, boundary, 7));
}
BENCHMARK(BM_CertifySegment);

void BM_VerifyBoundary(benchmark::State& state) {
  const SystemModel sys = double_integrator();
  const BoundaryState boundary = ellipse_boundary(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(verify(sys, boundary));
}
BENCHMARK(BM_VerifyBoundary)->Arg(10)->Arg(50);

void BM_MarginGradient(benchmark::State& state) {
  const SystemModel sys = double_integrator();
  const BoundaryState boundary = ellipse_boundary(50);
  for (auto _ : state) benchmark::DoNotOptimize(grad_margin(sys, boundary, 7));
}
BENCHMARK(BM_MarginGradient);

void BM_SafeInputQp(benchmark::State& state) {
  const SystemModel sys = double_integrator();
  ExpansionConfig cfg;
  cfg.init.P = (Matrix2d() << 11.1, 0.0, 0.0, 100.0).finished();
  cfg.init.level = 1.0;
  cfg.init.n = static_cast<int>(state.range(0));
  const BoundaryState boundary = initial_boundary(cfg.init);
  for (auto _ : state) benchmark::DoNotOptimize(safe_input(sys, boundary, cfg));
}
BENCHMARK(BM_SafeInputQp)->Arg(10)->Arg(50);

void BM_SignedDistance(benchmark::State& state) {
  const BoundaryState boundary = ellipse_boundary(50);
  SdfEvaluator sdf(boundary);
  const Vector2d x(0.05, 0.02);
  for (auto _ : state) benchmark::DoNotOptimize(sdf(x));
}
BENCHMARK(BM_SignedDistance);

void BM_FilterControl(benchmark::State& state) {
  const SystemModel sys = double_integrator();
  const BoundaryState boundary = ellipse_boundary(50);
  SdfEvaluator sdf(boundary);
  const Vector2d x(0.05, 0.02);
  const VectorXd u_ref = VectorXd::Constant(1, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(filter_control(sdf, sys, x, u_ref, 1.0, 1e3));
}
BENCHMARK(BM_FilterControl);

}  // namespace

BENCHMARK_MAIN();
