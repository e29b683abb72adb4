// Serial reference vs OpenMP versions of the per-sample reductions.

#include <map>
#include <utility>

#include <benchmark/benchmark.h>

#include "ces/distribution.hpp"
#include "ces/kernels.hpp"
#include "ces/matrix_kit.hpp"
#include "ces/sampler.hpp"

namespace {

struct Fixture {
  ces::DataMatrix data;
  ces::Vector mu;
  ces::Matrix chol;
  ces::Vector w;
};

const Fixture& fixture(int n, int m) {
  static thread_local std::map<std::pair<int, int>, Fixture> cache;
  auto it = cache.find({n, m});
  if (it != cache.end()) return it->second;
  ces::Matrix s = ces::Matrix::Identity(m, m);
  for (int i = 0; i + 1 < m; ++i) s(i, i + 1) = s(i + 1, i) = 0.3;
  const ces::DistributionSpec spec(ces::FamilyKernel::student(m, 5.0), ces::Vector::Zero(m), ces::SymMatrix(s));
  Fixture f;
  f.data = ces::sample_res(spec, n, 7).data;
  f.mu = ces::Vector::Zero(m);
  f.chol = ces::cholesky_sqrt(spec.sigma);
  f.w = ces::Vector::Ones(n);
  return cache.emplace(std::make_pair(n, m), std::move(f)).first->second;
}

void BM_mahalanobis_serial(benchmark::State& st) {
  const auto& f = fixture(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(ces::kernels::serial::mahalanobis_batch(f.data, f.mu, f.chol));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_mahalanobis_omp(benchmark::State& st) {
  const auto& f = fixture(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(ces::kernels::mahalanobis_batch(f.data, f.mu, f.chol));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_scatter_serial(benchmark::State& st) {
  const auto& f = fixture(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(ces::kernels::serial::weighted_scatter(f.data, f.mu, f.w));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_scatter_omp(benchmark::State& st) {
  const auto& f = fixture(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(ces::kernels::weighted_scatter(f.data, f.mu, f.w));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_sum_serial(benchmark::State& st) {
  const auto& f = fixture(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(ces::kernels::serial::weighted_sum(f.data, f.w));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_sum_omp(benchmark::State& st) {
  const auto& f = fixture(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(ces::kernels::weighted_sum(f.data, f.w));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int n : {10000, 100000})
    for (int m : {2, 8, 32}) b->Args({n, m});
}

}  // namespace

BENCHMARK(BM_mahalanobis_serial)->Apply(sizes);
BENCHMARK(BM_mahalanobis_omp)->Apply(sizes);
BENCHMARK(BM_scatter_serial)->Apply(sizes);
BENCHMARK(BM_scatter_omp)->Apply(sizes);
BENCHMARK(BM_sum_serial)->Apply(sizes);
BENCHMARK(BM_sum_omp)->Apply(sizes);

BENCHMARK_MAIN();
