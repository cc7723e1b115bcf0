// Microbenchmarks for the hot paths: evaluation, jet assembly, zero finding,
// classification, and the two-jet equivalence search. Run the binary directly;
// it is not part of the test suite.

#include <confzero/field.hpp>
#include <confzero/fixtures.hpp>
#include <confzero/jets.hpp>
#include <confzero/metric.hpp>
#include <confzero/rng.hpp>
#include <confzero/zeros.hpp>

#include <benchmark/benchmark.h>

namespace {

using namespace confzero;

void BM_Evaluate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  const MetricSpace M(1, n - 1);
  const FlatConformalField f = random_field(M, rng);
  const Eigen::VectorXd x = rng.gauss_vec(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(f, x, M));
  }
}
BENCHMARK(BM_Evaluate)->Arg(4)->Arg(6);

void BM_JetAt(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(2);
  const MetricSpace M(1, n - 1);
  const FlatConformalField f = random_field(M, rng);
  const Eigen::VectorXd x = rng.gauss_vec(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(jet_at(f, x, M));
  }
}
BENCHMARK(BM_JetAt)->Arg(4)->Arg(6);

void BM_CharPoly(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(3);
  const MetricSpace M(1, n - 1);
  const FlatConformalField f = random_field(M, rng);
  const PointJet jet = jet_at(f, rng.gauss_vec(n), M);
  for (auto _ : state) {
    benchmark::DoNotOptimize(char_poly(jet.J));
  }
}
BENCHMARK(BM_CharPoly)->Arg(4)->Arg(6);

void BM_FindZeros(benchmark::State& state) {
  const Fixture fx = from_constructor("lorentz-cone(n=4)");
  NewtonOptions opts;
  opts.grid = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_zeros(fx.field, fx.space, fx.box, opts));
  }
}
BENCHMARK(BM_FindZeros)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_ClassifyZero(benchmark::State& state) {
  const Fixture fx = from_constructor("lorentz-cone(n=4)");
  const PointJet jet = jet_at(fx.field, fx.base_zero, fx.space);
  for (auto _ : state) {
    benchmark::DoNotOptimize(classify_zero(jet, fx.space));
  }
}
BENCHMARK(BM_ClassifyZero);

void BM_TwoJetEquivalent(benchmark::State& state) {
  Rng rng(4);
  const MetricSpace M(2, 2);
  const PlantedPair pair = plant_equivalent_pair(M, rng);
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(4);
  const PointJet j1 = jet_at(pair.f1, origin, M);
  const PointJet j2 = jet_at(pair.f2, origin, M);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(two_jet_equivalent(j1, M, j2, M, seed++));
  }
}
BENCHMARK(BM_TwoJetEquivalent)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
