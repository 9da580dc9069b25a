#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "dvlest/errors.hpp"

namespace dvlest {

/// Dense row-major tensor of doubles. All model arithmetic is 64-bit:
/// the gradient-check tolerances in the test suite require it and the
/// models are small enough that precision costs nothing.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> v;

  Tensor() = default;
  Tensor(std::initializer_list<std::size_t> s, double fill = 0.0)
      : shape(s), v(numel_of(shape), fill) {}
  explicit Tensor(std::vector<std::size_t> s, double fill = 0.0)
      : shape(std::move(s)), v(numel_of(shape), fill) {}

  static std::size_t numel_of(const std::vector<std::size_t>& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1},
                           std::multiplies<>());
  }

  std::size_t numel() const { return v.size(); }
  bool empty() const { return v.empty(); }

  std::size_t dim(std::size_t i) const { return shape.at(i); }

  // 2-d accessors (rows x cols)
  double& at(std::size_t i, std::size_t j) { return v[i * shape[1] + j]; }
  double at(std::size_t i, std::size_t j) const { return v[i * shape[1] + j]; }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  std::string shape_str() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i)
      s += (i ? "x" : "") + std::to_string(shape[i]);
    return s + "]";
  }
};

}  // namespace dvlest
