#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace entropylab {

using Point = std::array<double, 2>;

// Uniform periodic grid on [-L, L)^d. Nodes sit at x_i = -L + i h, so the
// origin is a node whenever m is even. Flat index is i + m j.
class GridSpec {
 public:
  GridSpec(int dim, int points, double half_width);

  int dim() const { return dim_; }
  int points() const { return m_; }
  double half_width() const { return half_width_; }
  double spacing() const { return h_; }
  double cell_volume() const { return dim_ == 1 ? h_ : h_ * h_; }
  std::size_t size() const { return size_; }

  double coordinate(int i) const { return -half_width_ + i * h_; }
  Point node(std::size_t index) const;
  std::size_t index(int i, int j = 0) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(m_) * j; }
  int wrap(int i) const { return ((i % m_) + m_) % m_; }
  // Periodic neighbour of node k shifted by s along axis a.
  std::size_t neighbor(std::size_t k, int axis, int s) const {
    if (dim_ == 1) return static_cast<std::size_t>(wrap(static_cast<int>(k) + s));
    int i = static_cast<int>(k % m_);
    int j = static_cast<int>(k / m_);
    if (axis == 0) i = wrap(i + s);
    else j = wrap(j + s);
    return index(i, j);
  }

  GridSpec refined() const { return GridSpec(dim_, 2 * m_, half_width_); }
  bool operator==(const GridSpec& other) const = default;

 private:
  int dim_;
  int m_;
  double half_width_;
  double h_;
  std::size_t size_;
};

enum class FieldRole { generic, density_u, log_potential_v };

// Immutable node samples on a grid.
class ScalarField {
 public:
  ScalarField(GridSpec grid, std::vector<double> values, FieldRole role = FieldRole::generic);

  static ScalarField sample(const GridSpec& grid, const std::function<double(const Point&)>& f,
                            FieldRole role = FieldRole::generic);

  const GridSpec& grid() const { return grid_; }
  FieldRole role() const { return role_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double max_abs() const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
  FieldRole role_;
};

// Per-node gradient and/or packed symmetric Hessian. Packing is {xx} in 1-D
// and {xx, xy, yy} in 2-D. Either part may be empty.
struct TensorField {
  GridSpec grid;
  std::vector<std::vector<double>> gradient;
  std::vector<std::vector<double>> hessian;

  explicit TensorField(const GridSpec& g) : grid(g) {}

  bool has_gradient() const { return !gradient.empty(); }
  bool has_hessian() const { return !hessian.empty(); }
  static int packed(int a, int b) { return a + b; }
  double hess(int a, int b, std::size_t node) const { return hessian[packed(a, b)][node]; }
  double grad_norm2(std::size_t node) const;
};

}  // namespace entropylab
