#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include <omp.h>

namespace entropylab::parallel {

// Reductions are summed per fixed-size block, then the block partials are
// added in index order. The result does not depend on the thread count.
inline constexpr std::size_t kBlock = 1024;

int thread_count();
void set_thread_count(int n);
// Applies ENTROPYLAB_THREADS if set; returns the resulting cap.
int apply_env_thread_cap();

template <class Body>
void for_each(std::size_t count, Body&& body) {
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(static) if (count >= 4 * kBlock)
  for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
}

template <class Term>
double sum(std::size_t count, Term&& term) {
  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static) if (blocks >= 4)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(count, lo + kBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[b] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

template <class Term>
double max(std::size_t count, Term&& term) {
  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static) if (blocks >= 4)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(count, lo + kBlock);
    double s = -std::numeric_limits<double>::infinity();
    for (std::size_t i = lo; i < hi; ++i) s = std::max(s, term(i));
    partial[b] = s;
  }
  double best = -std::numeric_limits<double>::infinity();
  for (double s : partial) best = std::max(best, s);
  return best;
}

}  // namespace entropylab::parallel
