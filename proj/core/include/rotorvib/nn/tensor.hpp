#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace rotorvib::nn {

/// Dense n-dimensional array. Training uses float storage; gradient-check
/// tests instantiate the same kernels with double.
template <typename T>
struct TensorT {
  std::vector<int> shape;
  std::vector<T> data;

  TensorT() = default;
  explicit TensorT(std::vector<int> s) : shape(std::move(s)) {
    data.resize(static_cast<std::size_t>(numel_of(shape)));
  }

  static std::int64_t numel_of(const std::vector<int>& s) {
    std::int64_t n = 1;
    for (const int d : s) {
      if (d < 0) throw std::invalid_argument("negative tensor dimension");
      n *= d;
    }
    return n;
  }

  std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }

  int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }

  void fill(T v) { std::fill(data.begin(), data.end(), v); }

  bool same_shape(const TensorT& other) const { return shape == other.shape; }
};

using Tensor = TensorT<float>;

}  // namespace rotorvib::nn
