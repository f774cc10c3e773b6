#include <benchmark/benchmark.h>

#include "cblab/cbnorm.hpp"
#include "cblab/gcb.hpp"

using namespace cblab;

static void BM_OperatorNorm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng = make_rng(RngSeed{1});
  const ComplexMatrix a = gaussian_matrix(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(operator_norm(a));
}
BENCHMARK(BM_OperatorNorm)->Arg(2)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

static void BM_AmplifyGeometric(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  Rng rng = make_rng(RngSeed{2});
  const HoloFunction f = moebius_quotient(identity_function(), 0.5);
  const OpSpaceMatrix x = sample_space_ball(space_scalar(), m, 0.9, rng);
  for (auto _ : state) benchmark::DoNotOptimize(amplify(f, x));
}
BENCHMARK(BM_AmplifyGeometric)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

static void BM_LevelSup(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const HoloFunction f = moebius_quotient(identity_function(), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(level_sup(f, m, 2000, RngSeed{3}));
}
BENCHMARK(BM_LevelSup)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_GcbUpperBound(benchmark::State& state) {
  Rng rng = make_rng(RngSeed{4});
  GcbElement u;
  u.space = space_scalar();
  u.target_level = 1;
  for (int i = 0; i < 3; ++i) {
    u.terms.push_back({Complex{1.0, 0.0}, gaussian_matrix(1, 2, rng), sample_space_ball(space_scalar(), 2, 0.8, rng),
                       gaussian_matrix(2, 1, rng)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(gcb_upper_bound(u, 1000, RngSeed{5}));
}
BENCHMARK(BM_GcbUpperBound)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
