// Reference vs vectorized kernels, and serial vs OpenMP replica execution.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "polymerlab/experiment.hpp"
#include "polymerlab/kernels.hpp"
#include "polymerlab/rng.hpp"

using namespace polymerlab;

namespace {

std::vector<double> uniforms(std::size_t m, std::uint64_t seed) {
  Stream s(seed);
  std::vector<double> v(m);
  s.fill_uniform(v);
  return v;
}

void row_step_args(benchmark::internal::Benchmark* b) {
  for (int n : {1024, 4096, 1 << 16}) b->Arg(n);
}

void BM_row_step_ref(benchmark::State& st) {
  const int len = static_cast<int>(st.range(0));
  auto prev = uniforms(len, 1), omega = uniforms(len + 1, 2);
  std::vector<double> next(len + 1);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::ref::row_step(prev.data(), len, next.data(), omega.data(), 0.3, 0, len));
  st.SetItemsProcessed(st.iterations() * (len + 1));
}
BENCHMARK(BM_row_step_ref)->Apply(row_step_args);

void BM_row_step_fast(benchmark::State& st) {
  const int len = static_cast<int>(st.range(0));
  auto prev = uniforms(len, 1), omega = uniforms(len + 1, 2);
  std::vector<double> next(len + 1);
  for (auto _ : st)
    benchmark::DoNotOptimize(kernels::fast::row_step(prev.data(), 0, len - 1, next.data(), omega.data(), 0.3, 0, len));
  st.SetItemsProcessed(st.iterations() * (len + 1));
}
BENCHMARK(BM_row_step_fast)->Apply(row_step_args);

template <bool Fast>
void BM_quantile(benchmark::State& st) {
  const TailSpec s = TailSpec::lomax(1.5, 0.5);
  auto u = uniforms(4096, 3);
  std::vector<double> out(u.size());
  for (auto _ : st) {
    if constexpr (Fast) kernels::fast::quantile_batch(s, u.data(), out.data(), u.size());
    else kernels::ref::quantile_batch(s, u.data(), out.data(), u.size());
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(u.size()));
}
BENCHMARK(BM_quantile<false>)->Name("BM_quantile_ref");
BENCHMARK(BM_quantile<true>)->Name("BM_quantile_fast");

template <bool Fast>
void BM_point_sum(benchmark::State& st) {
  const kernels::PointMap pm{1.5, 0.5, 1e-3, 8.0};
  auto u1 = uniforms(4096, 4), u2 = uniforms(4096, 5), u3 = uniforms(4096, 6);
  for (auto _ : st) {
    auto r = Fast ? kernels::fast::point_sum(pm, 1.0, u1.data(), u2.data(), u3.data(), u1.size())
                  : kernels::ref::point_sum(pm, 1.0, u1.data(), u2.data(), u3.data(), u1.size());
    benchmark::DoNotOptimize(r);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(u1.size()));
}
BENCHMARK(BM_point_sum<false>)->Name("BM_point_sum_ref");
BENCHMARK(BM_point_sum<true>)->Name("BM_point_sum_fast");

template <bool Fast>
void BM_expm1_dot(benchmark::State& st) {
  auto p = uniforms(4096, 7), w = uniforms(4096, 8);
  for (auto _ : st) {
    double r = Fast ? kernels::fast::expm1_dot(p.data(), w.data(), p.size(), 0.01, 0.9, 0.001)
                    : kernels::ref::expm1_dot(p.data(), w.data(), p.size(), 0.01, 0.9, 0.001);
    benchmark::DoNotOptimize(r);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(p.size()));
}
BENCHMARK(BM_expm1_dot<false>)->Name("BM_expm1_dot_ref");
BENCHMARK(BM_expm1_dot<true>)->Name("BM_expm1_dot_fast");

// Replica-level parallelism; arg = worker count.
void BM_replicas(benchmark::State& st) {
  ExperimentConfig c;
  c.tail = TailSpec::lomax(4, 1);
  c.schedule = BetaSchedule::heavy_scale(0.5);
  c.theorem = Theorem::TGAUSS;
  c.n_list = {512};
  c.replicas = 16;
  c.workers = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(run_replicas(c));
  st.SetItemsProcessed(st.iterations() * c.replicas);
}
BENCHMARK(BM_replicas)->Arg(1)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
