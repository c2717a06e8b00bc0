#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "groundkit/rng.hpp"

namespace groundkit::num {

using Shape = std::vector<int>;

// Dense row-major tensor of 64-bit reals. Rank 0 (scalar), 1 (vector)
// and 2 (matrix) are the ranks the pipeline uses. Values are immutable
// once the tensor is placed on a tape.
struct Tensor {
  Shape shape;
  std::vector<double> data;
  bool requires_grad = false;

  Tensor() = default;

  static Tensor zeros(const Shape& s, bool rg = false);
  static Tensor full(const Shape& s, double v, bool rg = false);
  static Tensor scalar(double v, bool rg = false);
  static Tensor from(const Shape& s, std::vector<double> values, bool rg = false);
  static Tensor xavier(int fan_in, int fan_out, Rng& rng, bool rg = true);

  int rank() const { return static_cast<int>(shape.size()); }
  std::size_t numel() const;

  // rank-2 accessors
  int rows() const;
  int cols() const;
  double& at(int i, int j);
  double at(int i, int j) const;

  // rank-1 / flat accessors
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }
  bool all_finite() const;
  std::string shape_str() const;
};

std::size_t shape_numel(const Shape& s);

}  // namespace groundkit::num
