#pragma once

// Test-only reference implementations. Each one recomputes the quantity it
// checks with the most direct method available, independent of the library
// code paths under test.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "rotorvib/nn/tensor.hpp"

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

/// O(N^2) direct DFT.
inline std::vector<std::complex<double>> naive_dft(
    const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t m = 0; m < n; ++m) {
      const double ang =
          -2.0 * kPi * static_cast<double>(k) * static_cast<double>(m) /
          static_cast<double>(n);
      acc += x[m] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

/// Six-nested-loop 3x3 convolution, stride 1, zero padding 1.
template <typename T>
rotorvib::nn::TensorT<T> direct_conv3x3(const rotorvib::nn::TensorT<T>& x,
                                        const rotorvib::nn::TensorT<T>& w,
                                        const rotorvib::nn::TensorT<T>& b) {
  const int batch = x.dim(0), ci = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const int co = w.dim(0);
  rotorvib::nn::TensorT<T> y({batch, co, h, wd});
  auto xat = [&](int n, int c, int yy, int xx) -> T {
    if (yy < 0 || yy >= h || xx < 0 || xx >= wd) return T(0);
    return x.data[((static_cast<std::size_t>(n) * ci + c) * h + yy) * wd + xx];
  };
  for (int n = 0; n < batch; ++n)
    for (int o = 0; o < co; ++o)
      for (int oy = 0; oy < h; ++oy)
        for (int ox = 0; ox < wd; ++ox) {
          T acc = b.data[o];
          for (int i = 0; i < ci; ++i)
            for (int ky = 0; ky < 3; ++ky)
              for (int kx = 0; kx < 3; ++kx)
                acc += w.data[((static_cast<std::size_t>(o) * ci + i) * 3 + ky) *
                                  3 +
                              kx] *
                       xat(n, i, oy + ky - 1, ox + kx - 1);
          y.data[((static_cast<std::size_t>(n) * co + o) * h + oy) * wd + ox] =
              acc;
        }
  return y;
}

/// Central finite difference of a scalar functional with respect to *x.
template <typename F>
double central_diff(double* x, F&& eval, double step = 1e-5) {
  const double orig = *x;
  *x = orig + step;
  const double fp = eval();
  *x = orig - step;
  const double fm = eval();
  *x = orig;
  return (fp - fm) / (2.0 * step);
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

/// Brute-force corner-aligned bilinear sample of an image channel.
inline double bilinear_byte(const std::vector<std::uint8_t>& pixels, int width,
                            int height, int channel, double sy, double sx) {
  const int y0 = static_cast<int>(sy);
  const int x0 = static_cast<int>(sx);
  const int y1 = std::min(y0 + 1, height - 1);
  const int x1 = std::min(x0 + 1, width - 1);
  const double fy = sy - y0;
  const double fx = sx - x0;
  auto at = [&](int y, int x) {
    return static_cast<double>(
        pixels[(static_cast<std::size_t>(y) * width + x) * 3 + channel]);
  };
  return (1 - fy) * ((1 - fx) * at(y0, x0) + fx * at(y0, x1)) +
         fy * ((1 - fx) * at(y1, x0) + fx * at(y1, x1));
}

}  // namespace oracle
