#include "groundkit/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace groundkit::num {

std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (int d : s) {
    if (d < 0) throw std::invalid_argument("tensor: negative dimension");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

Tensor Tensor::zeros(const Shape& s, bool rg) {
  Tensor t;
  t.shape = s;
  t.data.assign(shape_numel(s), 0.0);
  t.requires_grad = rg;
  return t;
}

Tensor Tensor::full(const Shape& s, double v, bool rg) {
  Tensor t = zeros(s, rg);
  for (double& x : t.data) x = v;
  return t;
}

Tensor Tensor::scalar(double v, bool rg) {
  Tensor t;
  t.shape = {};
  t.data = {v};
  t.requires_grad = rg;
  return t;
}

Tensor Tensor::from(const Shape& s, std::vector<double> values, bool rg) {
  if (shape_numel(s) != values.size())
    throw std::invalid_argument("tensor: value count does not match shape");
  Tensor t;
  t.shape = s;
  t.data = std::move(values);
  t.requires_grad = rg;
  return t;
}

Tensor Tensor::xavier(int fan_in, int fan_out, Rng& rng, bool rg) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor t = zeros({fan_in, fan_out}, rg);
  for (double& x : t.data) x = rng.uniform(-limit, limit);
  return t;
}

std::size_t Tensor::numel() const { return data.size(); }

int Tensor::rows() const {
  if (rank() != 2) throw std::logic_error("tensor: rows() on rank " + std::to_string(rank()));
  return shape[0];
}

int Tensor::cols() const {
  if (rank() != 2) throw std::logic_error("tensor: cols() on rank " + std::to_string(rank()));
  return shape[1];
}

double& Tensor::at(int i, int j) {
  return data[static_cast<std::size_t>(i) * static_cast<std::size_t>(shape[1]) +
              static_cast<std::size_t>(j)];
}

double Tensor::at(int i, int j) const {
  return data[static_cast<std::size_t>(i) * static_cast<std::size_t>(shape[1]) +
              static_cast<std::size_t>(j)];
}

bool Tensor::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

}  // namespace groundkit::num
