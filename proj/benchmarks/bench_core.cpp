#include <benchmark/benchmark.h>

#include "qsa/entropy_opt.hpp"
#include "qsa/superadd.hpp"

using namespace qsa;

namespace {

OptimizerConfig bench_config(std::size_t restarts) {
  OptimizerConfig cfg;
  cfg.restarts = restarts;
  cfg.seed = RngSeed{17};
  return cfg;
}

}  // namespace

static void BM_VonNeumannEntropy(benchmark::State& st) {
  const auto dim = static_cast<std::size_t>(st.range(0));
  const DensityMatrix rho = random_density(dim, dim, RngSeed{1});
  for (auto _ : st) benchmark::DoNotOptimize(von_neumann_entropy(rho));
}
BENCHMARK(BM_VonNeumannEntropy)->Arg(2)->Arg(4)->Arg(9)->Arg(16);

static void BM_ApplyProductChannel(benchmark::State& st) {
  const auto dim = static_cast<std::size_t>(st.range(0));
  const Channel dep = depolarizing_channel({dim, 0.5});
  const Channel psi = random_kraus_channel(dim, 3, RngSeed{2});
  const DensityMatrix rho = random_density(dim * dim, dim * dim, RngSeed{3});
  for (auto _ : st) benchmark::DoNotOptimize(apply_product_channel(dep, psi, rho, {dim, dim}));
}
BENCHMARK(BM_ApplyProductChannel)->Arg(2)->Arg(3);

static void BM_SMinNumeric(benchmark::State& st) {
  const auto dim = static_cast<std::size_t>(st.range(0));
  const Channel ch = random_kraus_channel(dim, 2, RngSeed{4});
  const OptimizerConfig cfg = bench_config(8);
  for (auto _ : st) benchmark::DoNotOptimize(s_min_numeric(ch, cfg).value);
}
BENCHMARK(BM_SMinNumeric)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_HHatNumeric(benchmark::State& st) {
  const auto dim = static_cast<std::size_t>(st.range(0));
  const Channel ch = random_kraus_channel(dim, 2, RngSeed{5});
  const DensityMatrix rho = random_density(dim, dim, RngSeed{6});
  const OptimizerConfig cfg = bench_config(4);
  for (auto _ : st) benchmark::DoNotOptimize(h_hat_numeric(ch, rho, cfg).value);
}
BENCHMARK(BM_HHatNumeric)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_KingBound(benchmark::State& st) {
  const auto dim = static_cast<std::size_t>(st.range(0));
  const BipartiteDims dims(dim, dim);
  const DensityMatrix rho = random_density(dims.total(), dims.total(), RngSeed{7});
  const OrthonormalBasis basis = balanced_basis(partial_trace(rho, dims, TraceOut::K), RngSeed{8});
  const Channel psi = random_kraus_channel(dim, 2, RngSeed{9});
  for (auto _ : st) benchmark::DoNotOptimize(king_bound(rho, dims, basis, psi, {dim, 0.5}).margin);
}
BENCHMARK(BM_KingBound)->Arg(2)->Arg(3);

static void BM_StrongSuperaddCheck(benchmark::State& st) {
  const BipartiteDims dims(2, 2);
  const DensityMatrix rho = random_density(4, 4, RngSeed{10});
  const Channel psi = random_kraus_channel(2, 2, RngSeed{11});
  const OptimizerConfig cfg = bench_config(8);
  for (auto _ : st) benchmark::DoNotOptimize(strong_superadd_check(psi, rho, dims, {2, 0.5}, cfg).margin);
}
BENCHMARK(BM_StrongSuperaddCheck)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
