#include "entropylab/grid.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "entropylab/errors.hpp"
#include "entropylab/parallel.hpp"

namespace entropylab {

GridSpec::GridSpec(int dim, int points, double half_width)
    : dim_(dim), m_(points), half_width_(half_width), h_(0.0), size_(0) {
  if (dim != 1 && dim != 2) throw InvalidInput("grid dimension must be 1 or 2");
  if (points < 8) throw InvalidInput("grid needs at least 8 points per axis");
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw InvalidInput("grid half-width must be positive");
  h_ = 2.0 * half_width / points;
  size_ = dim == 1 ? static_cast<std::size_t>(points) : static_cast<std::size_t>(points) * points;
}

Point GridSpec::node(std::size_t index) const {
  if (dim_ == 1) return {coordinate(static_cast<int>(index)), 0.0};
  const int i = static_cast<int>(index % m_);
  const int j = static_cast<int>(index / m_);
  return {coordinate(i), coordinate(j)};
}

ScalarField::ScalarField(GridSpec grid, std::vector<double> values, FieldRole role)
    : grid_(grid), values_(std::move(values)), role_(role) {
  if (values_.size() != grid_.size()) throw InvalidInput("field size does not match grid");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw InvalidInput("non-finite field value at node " + std::to_string(i));
    if (role_ == FieldRole::density_u && !(values_[i] > 0.0))
      throw InvalidInput("density must be strictly positive (node " + std::to_string(i) + ")");
  }
}

ScalarField ScalarField::sample(const GridSpec& grid, const std::function<double(const Point&)>& f, FieldRole role) {
  std::vector<double> values(grid.size());
  parallel::for_each(grid.size(), [&](std::size_t k) { values[k] = f(grid.node(k)); });
  return ScalarField(grid, std::move(values), role);
}

double ScalarField::max_abs() const {
  return parallel::max(values_.size(), [&](std::size_t k) { return std::abs(values_[k]); });
}

double TensorField::grad_norm2(std::size_t node) const {
  double s = 0.0;
  for (const auto& g : gradient) s += g[node] * g[node];
  return s;
}

namespace parallel {

int thread_count() { return omp_get_max_threads(); }

void set_thread_count(int n) {
  if (n < 1) throw InvalidInput("thread count must be positive");
  omp_set_num_threads(n);
}

int apply_env_thread_cap() {
  if (const char* env = std::getenv("ENTROPYLAB_THREADS"); env && *env) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1) throw InvalidInput("ENTROPYLAB_THREADS must be a positive integer");
    set_thread_count(static_cast<int>(n));
  }
  return thread_count();
}

}  // namespace parallel
}  // namespace entropylab
