#include <benchmark/benchmark.h>

#include <vector>

#include "bseries/sampler.hpp"
#include "bseries/semilinear.hpp"
#include "bseries/series.hpp"

namespace {

using namespace bseries;

void BM_DerivativeTensor(benchmark::State& state) {
  const auto f = VectorField::parse("1; x1*x2 + x2^2", 2);
  const std::vector<double> x{0.3, 0.5};
  const auto m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(f.compute_derivative_tensor(x, m));
}
BENCHMARK(BM_DerivativeTensor)->DenseRange(1, 8, 1);

void BM_TruncatedButcher(benchmark::State& state) {
  const auto f = VectorField::parse("exp(x1)", 1);
  const std::vector<double> x0{1.0};
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(truncated_butcher(f, x0, 0.0, 0.2, n));
}
BENCHMARK(BM_TruncatedButcher)->DenseRange(2, 10, 2);

void BM_SampleTree(benchmark::State& state) {
  const auto law = SizeDistribution::geometric(0.5).capped(kDefaultOrderCap);
  std::uint64_t k = 0;
  for (auto _ : state) {
    StreamRng rng(1, k++);
    benchmark::DoNotOptimize(sample_labelled_tree(law, rng));
  }
}
BENCHMARK(BM_SampleTree);

void BM_McEstimate(benchmark::State& state) {
  const auto f = VectorField::parse("1; x1*x2 + x2^2", 2);
  const std::vector<double> x0{0.0, 0.5};
  const auto law = SizeDistribution::geometric(0.5);
  const McOptions options{.workers = static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(mc_estimate(f, x0, 0.0, 1.0, law, 20000, 1, options));
  state.SetItemsProcessed(state.iterations() * 20000);
}
BENCHMARK(BM_McEstimate)->Arg(1)->Arg(4)->UseRealTime();

void BM_SemilinearEstimate(benchmark::State& state) {
  Matrix a(2, 2);
  a << -1, 1, 1, -1;
  const GeneratorMatrix gen(a);
  const auto g = VectorField::parse("x1^2; x2^2", 2);
  const std::vector<double> x0{0.5, 0.25};
  for (auto _ : state) benchmark::DoNotOptimize(semilinear_mc_estimate(gen, g, x0, 0, 0.0, 1.0, 20000, 1));
  state.SetItemsProcessed(state.iterations() * 20000);
}
BENCHMARK(BM_SemilinearEstimate);

void BM_Phi(benchmark::State& state) {
  Matrix a(3, 3);
  a << -1.5, 1.0, 0.5, 0.2, -0.2, 0.0, 2.0, 1.0, -3.0;
  for (auto _ : state) benchmark::DoNotOptimize(phi_all(8, 2.0, a));
}
BENCHMARK(BM_Phi);

}  // namespace
BENCHMARK_MAIN();
