// Serial reference kernels against the OpenMP ones on 2-D grids.
//   bench_kernels --benchmark_filter=Rhs
// Arguments are {points per axis, threads}; threads = 0 means the serial
// reference path.

#include <cmath>

#include <benchmark/benchmark.h>

#include "entropylab/functionals.hpp"
#include "entropylab/parallel.hpp"
#include "entropylab/reference.hpp"
#include "entropylab/solver.hpp"
#include "entropylab/stencils.hpp"

using namespace entropylab;

namespace {

ScalarField smooth_field(int m) {
  const GridSpec g(2, m, 6.0);
  return ScalarField::sample(g, [](const Point& x) {
    return 0.25 * (x[0] * x[0] + x[1] * x[1]) + 0.3 * std::sin(x[0]) * std::cos(0.5 * x[1]);
  });
}

void configure(benchmark::internal::Benchmark* b) {
  for (int m : {256, 512, 1024})
    for (int t : {0, 1, 2, 4, 8}) b->Args({m, t});
  b->Unit(benchmark::kMicrosecond);
}

struct Threads {
  explicit Threads(int n) : saved(parallel::thread_count()) {
    if (n > 0) parallel::set_thread_count(n);
  }
  ~Threads() { parallel::set_thread_count(saved); }
  int saved;
};

void BM_Derivatives(benchmark::State& st) {
  const ScalarField v = smooth_field(static_cast<int>(st.range(0)));
  const int threads = static_cast<int>(st.range(1));
  Threads guard(threads);
  for (auto _ : st) {
    if (threads == 0) {
      benchmark::DoNotOptimize(reference::gradient(v));
      benchmark::DoNotOptimize(reference::hessian(v));
    } else {
      benchmark::DoNotOptimize(derivatives(v));
    }
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(v.size()));
}

void BM_Rhs(benchmark::State& st) {
  const ScalarField v = smooth_field(static_cast<int>(st.range(0)));
  const int threads = static_cast<int>(st.range(1));
  const PParams pp(3.0, 2);
  const double eps = default_regularization(v);
  Threads guard(threads);
  for (auto _ : st) {
    if (threads == 0) benchmark::DoNotOptimize(reference::conservative_rhs(v, pp.p, eps));
    else benchmark::DoNotOptimize(rhs(v, pp, eps));
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(v.size()));
}

void BM_Integrate(benchmark::State& st) {
  const ScalarField v = smooth_field(static_cast<int>(st.range(0)));
  const int threads = static_cast<int>(st.range(1));
  Threads guard(threads);
  for (auto _ : st) {
    if (threads == 0) benchmark::DoNotOptimize(reference::integrate(v.grid(), v.values()));
    else benchmark::DoNotOptimize(integrate(v));
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(v.size()));
}

void BM_JDirect(benchmark::State& st) {
  const ScalarField v = smooth_field(static_cast<int>(st.range(0)));
  const int threads = static_cast<int>(st.range(1));
  if (threads == 0) {
    st.SkipWithError("no serial reference for j_direct");
    return;
  }
  const PParams pp(3.0, 2);
  const double eps = default_regularization(v);
  Threads guard(threads);
  for (auto _ : st) benchmark::DoNotOptimize(j_direct(v, pp, eps));
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(v.size()));
}

}  // namespace

BENCHMARK(BM_Derivatives)->Apply(configure);
BENCHMARK(BM_Rhs)->Apply(configure);
BENCHMARK(BM_Integrate)->Apply(configure);
BENCHMARK(BM_JDirect)->Apply(configure);

BENCHMARK_MAIN();
