#pragma once

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <stdexcept>
#include <vector>

#include "rotorvib/nn/tensor.hpp"

// Layer kernels over N,C,H,W activations (Linear over N,F). All are
// templated on the scalar type so tests can run them in double precision.

namespace rotorvib::nn {

inline constexpr double kBatchNormEps = 1e-5;

namespace detail {

template <typename T>
void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// 3x3 convolution, stride 1, zero padding 1 (spatial dims preserved).

template <typename T>
void conv3x3_forward(const TensorT<T>& x, const TensorT<T>& w,
                     const TensorT<T>& b, TensorT<T>& y) {
  detail::require<T>(x.shape.size() == 4, "conv: input must be N,C,H,W");
  detail::require<T>(w.shape.size() == 4 && w.dim(2) == 3 && w.dim(3) == 3,
                     "conv: weights must be Co,Ci,3,3");
  const int batch = x.dim(0), ci = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const int co = w.dim(0);
  detail::require<T>(w.dim(1) == ci, "conv: channel mismatch");
  detail::require<T>(b.numel() == co, "conv: bias size mismatch");
  detail::require<T>(h >= 1 && wd >= 1, "conv: empty spatial dims");

  y = TensorT<T>({batch, co, h, wd});
  const std::size_t plane = static_cast<std::size_t>(h) * wd;
  for (int n = 0; n < batch; ++n) {
    for (int o = 0; o < co; ++o) {
      T* yp = y.data.data() + (static_cast<std::size_t>(n) * co + o) * plane;
      std::fill(yp, yp + plane, b.data[o]);
      for (int i = 0; i < ci; ++i) {
        const T* xp =
            x.data.data() + (static_cast<std::size_t>(n) * ci + i) * plane;
        for (int ky = 0; ky < 3; ++ky) {
          const int dy = ky - 1;
          const int y0 = std::max(0, -dy), y1 = std::min(h, h - dy);
          for (int kx = 0; kx < 3; ++kx) {
            const int dx = kx - 1;
            const int x0 = std::max(0, -dx), x1 = std::min(wd, wd - dx);
            const T wv =
                w.data[((static_cast<std::size_t>(o) * ci + i) * 3 + ky) * 3 +
                       kx];
            for (int oy = y0; oy < y1; ++oy) {
              T* yrow = yp + static_cast<std::size_t>(oy) * wd;
              const T* xrow =
                  xp + static_cast<std::size_t>(oy + dy) * wd + dx;
              for (int ox = x0; ox < x1; ++ox) yrow[ox] += wv * xrow[ox];
            }
          }
        }
      }
    }
  }
}

template <typename T>
void conv3x3_backward(const TensorT<T>& x, const TensorT<T>& w,
                      const TensorT<T>& gy,
                      std::type_identity_t<TensorT<T>>* gx,
                      std::type_identity_t<TensorT<T>>* gw,
                      std::type_identity_t<TensorT<T>>* gb) {
  const int batch = x.dim(0), ci = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const int co = w.dim(0);
  detail::require<T>(gy.shape == std::vector<int>({batch, co, h, wd}),
                     "conv backward: upstream shape mismatch");
  const std::size_t plane = static_cast<std::size_t>(h) * wd;
  if (gx) {
    *gx = TensorT<T>({batch, ci, h, wd});
  }
  if (gw) {
    *gw = TensorT<T>(w.shape);
  }
  if (gb) {
    *gb = TensorT<T>({co});
  }
  for (int n = 0; n < batch; ++n) {
    for (int o = 0; o < co; ++o) {
      const T* gyp =
          gy.data.data() + (static_cast<std::size_t>(n) * co + o) * plane;
      if (gb) {
        T acc = 0;
        for (std::size_t idx = 0; idx < plane; ++idx) acc += gyp[idx];
        gb->data[o] += acc;
      }
      for (int i = 0; i < ci; ++i) {
        const T* xp =
            x.data.data() + (static_cast<std::size_t>(n) * ci + i) * plane;
        T* gxp = gx ? gx->data.data() +
                          (static_cast<std::size_t>(n) * ci + i) * plane
                    : nullptr;
        for (int ky = 0; ky < 3; ++ky) {
          const int dy = ky - 1;
          const int y0 = std::max(0, -dy), y1 = std::min(h, h - dy);
          for (int kx = 0; kx < 3; ++kx) {
            const int dx = kx - 1;
            const int x0 = std::max(0, -dx), x1 = std::min(wd, wd - dx);
            const std::size_t widx =
                ((static_cast<std::size_t>(o) * ci + i) * 3 + ky) * 3 + kx;
            const T wv = w.data[widx];
            T wacc = 0;
            for (int oy = y0; oy < y1; ++oy) {
              const T* gyrow = gyp + static_cast<std::size_t>(oy) * wd;
              const T* xrow = xp + static_cast<std::size_t>(oy + dy) * wd + dx;
              T* gxrow =
                  gxp ? gxp + static_cast<std::size_t>(oy + dy) * wd + dx
                      : nullptr;
              for (int ox = x0; ox < x1; ++ox) {
                const T g = gyrow[ox];
                wacc += g * xrow[ox];
                if (gxrow) gxrow[ox] += wv * g;
              }
            }
            if (gw) gw->data[widx] += wacc;
          }
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Batch normalization over N,H,W per channel.

template <typename T>
struct BatchNormCache {
  TensorT<T> xhat;
  std::vector<T> invstd;
};

/// Training mode uses batch statistics (biased variance) and updates the
/// running estimates with momentum; eval mode applies the running values.
/// Training requires a batch of at least 2.
template <typename T>
void batchnorm_forward(const TensorT<T>& x, const TensorT<T>& gamma,
                       const TensorT<T>& beta, TensorT<T>& running_mean,
                       TensorT<T>& running_var, bool training, double momentum,
                       TensorT<T>& y,
                       std::type_identity_t<BatchNormCache<T>>* cache) {
  detail::require<T>(x.shape.size() == 4, "batchnorm: input must be N,C,H,W");
  const int batch = x.dim(0), ch = x.dim(1), h = x.dim(2), wd = x.dim(3);
  detail::require<T>(gamma.numel() == ch && beta.numel() == ch,
                     "batchnorm: affine size mismatch");
  if (training && batch < 2) {
    throw std::invalid_argument("batchnorm: training mode needs batch >= 2");
  }
  y = TensorT<T>(x.shape);
  const std::size_t plane = static_cast<std::size_t>(h) * wd;
  const std::size_t stride = static_cast<std::size_t>(ch) * plane;
  const double m = static_cast<double>(batch) * plane;

  if (cache) {
    cache->xhat = TensorT<T>(x.shape);
    cache->invstd.assign(ch, T(0));
  }
  for (int c = 0; c < ch; ++c) {
    double mean, var;
    if (training) {
      double sum = 0.0;
      for (int n = 0; n < batch; ++n) {
        const T* xp = x.data.data() + n * stride + c * plane;
        for (std::size_t i = 0; i < plane; ++i) sum += xp[i];
      }
      mean = sum / m;
      double sq = 0.0;
      for (int n = 0; n < batch; ++n) {
        const T* xp = x.data.data() + n * stride + c * plane;
        for (std::size_t i = 0; i < plane; ++i) {
          const double d = xp[i] - mean;
          sq += d * d;
        }
      }
      var = sq / m;
      const double unbiased = m > 1.0 ? sq / (m - 1.0) : var;
      running_mean.data[c] = static_cast<T>((1.0 - momentum) * running_mean.data[c] +
                                            momentum * mean);
      running_var.data[c] = static_cast<T>((1.0 - momentum) * running_var.data[c] +
                                           momentum * unbiased);
    } else {
      mean = running_mean.data[c];
      var = running_var.data[c];
    }
    const double invstd = 1.0 / std::sqrt(var + kBatchNormEps);
    if (cache) cache->invstd[c] = static_cast<T>(invstd);
    const T g = gamma.data[c];
    const T bta = beta.data[c];
    for (int n = 0; n < batch; ++n) {
      const T* xp = x.data.data() + n * stride + c * plane;
      T* yp = y.data.data() + n * stride + c * plane;
      T* xh = cache ? cache->xhat.data.data() + n * stride + c * plane : nullptr;
      for (std::size_t i = 0; i < plane; ++i) {
        const T xhat = static_cast<T>((xp[i] - mean) * invstd);
        if (xh) xh[i] = xhat;
        yp[i] = g * xhat + bta;
      }
    }
  }
}

template <typename T>
void batchnorm_backward(const TensorT<T>& gy, const TensorT<T>& gamma,
                        const BatchNormCache<T>& cache,
                        std::type_identity_t<TensorT<T>>* gx,
                        std::type_identity_t<TensorT<T>>* ggamma,
                        std::type_identity_t<TensorT<T>>* gbeta) {
  detail::require<T>(gy.shape == cache.xhat.shape,
                     "batchnorm backward: shape mismatch");
  const int batch = gy.dim(0), ch = gy.dim(1), h = gy.dim(2), wd = gy.dim(3);
  const std::size_t plane = static_cast<std::size_t>(h) * wd;
  const std::size_t stride = static_cast<std::size_t>(ch) * plane;
  const double m = static_cast<double>(batch) * plane;
  if (gx) *gx = TensorT<T>(gy.shape);
  if (ggamma) *ggamma = TensorT<T>({ch});
  if (gbeta) *gbeta = TensorT<T>({ch});
  for (int c = 0; c < ch; ++c) {
    double sum_gy = 0.0, sum_gy_xhat = 0.0;
    for (int n = 0; n < batch; ++n) {
      const T* gyp = gy.data.data() + n * stride + c * plane;
      const T* xh = cache.xhat.data.data() + n * stride + c * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        sum_gy += gyp[i];
        sum_gy_xhat += static_cast<double>(gyp[i]) * xh[i];
      }
    }
    if (ggamma) ggamma->data[c] = static_cast<T>(sum_gy_xhat);
    if (gbeta) gbeta->data[c] = static_cast<T>(sum_gy);
    if (gx) {
      const double scale = gamma.data[c] * cache.invstd[c] / m;
      for (int n = 0; n < batch; ++n) {
        const T* gyp = gy.data.data() + n * stride + c * plane;
        const T* xh = cache.xhat.data.data() + n * stride + c * plane;
        T* gxp = gx->data.data() + n * stride + c * plane;
        for (std::size_t i = 0; i < plane; ++i) {
          gxp[i] = static_cast<T>(
              scale * (m * gyp[i] - sum_gy - xh[i] * sum_gy_xhat));
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// ReLU.

template <typename T>
void relu_forward(const TensorT<T>& x, TensorT<T>& y) {
  y = TensorT<T>(x.shape);
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    y.data[i] = x.data[i] > T(0) ? x.data[i] : T(0);
  }
}

template <typename T>
void relu_backward(const TensorT<T>& x, const TensorT<T>& gy, TensorT<T>& gx) {
  detail::require<T>(x.same_shape(gy), "relu backward: shape mismatch");
  gx = TensorT<T>(x.shape);
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    gx.data[i] = x.data[i] > T(0) ? gy.data[i] : T(0);
  }
}

// ---------------------------------------------------------------------------
// 2x2 max pooling, stride 2; a trailing odd row/column is discarded.

template <typename T>
void maxpool2x2_forward(const TensorT<T>& x, TensorT<T>& y,
                        std::vector<std::int64_t>* argmax) {
  detail::require<T>(x.shape.size() == 4, "maxpool: input must be N,C,H,W");
  const int batch = x.dim(0), ch = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const int oh = h / 2, ow = wd / 2;
  detail::require<T>(oh >= 1 && ow >= 1, "maxpool: spatial dims too small");
  y = TensorT<T>({batch, ch, oh, ow});
  if (argmax) argmax->assign(y.data.size(), 0);
  std::size_t oidx = 0;
  for (int n = 0; n < batch; ++n) {
    for (int c = 0; c < ch; ++c) {
      const T* xp = x.data.data() +
                    (static_cast<std::size_t>(n) * ch + c) *
                        (static_cast<std::size_t>(h) * wd);
      const std::size_t base =
          (static_cast<std::size_t>(n) * ch + c) *
          (static_cast<std::size_t>(h) * wd);
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox, ++oidx) {
          std::size_t best = static_cast<std::size_t>(2 * oy) * wd + 2 * ox;
          T bestv = xp[best];
          for (int ky = 0; ky < 2; ++ky) {
            for (int kx = 0; kx < 2; ++kx) {
              const std::size_t idx =
                  static_cast<std::size_t>(2 * oy + ky) * wd + (2 * ox + kx);
              if (xp[idx] > bestv) {
                bestv = xp[idx];
                best = idx;
              }
            }
          }
          y.data[oidx] = bestv;
          if (argmax) (*argmax)[oidx] = static_cast<std::int64_t>(base + best);
        }
      }
    }
  }
}

template <typename T>
void maxpool2x2_backward(const TensorT<T>& gy,
                         const std::vector<std::int64_t>& argmax,
                         const std::vector<int>& input_shape, TensorT<T>& gx) {
  detail::require<T>(argmax.size() == gy.data.size(),
                     "maxpool backward: cache mismatch");
  gx = TensorT<T>(input_shape);
  for (std::size_t i = 0; i < gy.data.size(); ++i) {
    gx.data[static_cast<std::size_t>(argmax[i])] += gy.data[i];
  }
}

// ---------------------------------------------------------------------------
// Global average pooling: N,C,H,W -> N,C.

template <typename T>
void gap_forward(const TensorT<T>& x, TensorT<T>& y) {
  detail::require<T>(x.shape.size() == 4, "gap: input must be N,C,H,W");
  const int batch = x.dim(0), ch = x.dim(1);
  const std::size_t plane = static_cast<std::size_t>(x.dim(2)) * x.dim(3);
  detail::require<T>(plane >= 1, "gap: empty spatial dims");
  y = TensorT<T>({batch, ch});
  for (int n = 0; n < batch; ++n) {
    for (int c = 0; c < ch; ++c) {
      const T* xp =
          x.data.data() + (static_cast<std::size_t>(n) * ch + c) * plane;
      double acc = 0.0;
      for (std::size_t i = 0; i < plane; ++i) acc += xp[i];
      y.data[static_cast<std::size_t>(n) * ch + c] =
          static_cast<T>(acc / static_cast<double>(plane));
    }
  }
}

template <typename T>
void gap_backward(const TensorT<T>& gy, const std::vector<int>& input_shape,
                  TensorT<T>& gx) {
  gx = TensorT<T>(input_shape);
  const int batch = input_shape[0], ch = input_shape[1];
  const std::size_t plane =
      static_cast<std::size_t>(input_shape[2]) * input_shape[3];
  for (int n = 0; n < batch; ++n) {
    for (int c = 0; c < ch; ++c) {
      const T g = gy.data[static_cast<std::size_t>(n) * ch + c] /
                  static_cast<T>(plane);
      T* gxp = gx.data.data() + (static_cast<std::size_t>(n) * ch + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) gxp[i] = g;
    }
  }
}

// ---------------------------------------------------------------------------
// Fully connected: y = x * w^T + b with x of shape N,F and w of shape O,F.

template <typename T>
void linear_forward(const TensorT<T>& x, const TensorT<T>& w,
                    const TensorT<T>& b, TensorT<T>& y) {
  detail::require<T>(x.shape.size() == 2, "linear: input must be N,F");
  const int batch = x.dim(0), fin = x.dim(1);
  detail::require<T>(w.shape.size() == 2 && w.dim(1) == fin,
                     "linear: weight shape mismatch");
  const int fout = w.dim(0);
  detail::require<T>(b.numel() == fout, "linear: bias size mismatch");
  y = TensorT<T>({batch, fout});
  for (int n = 0; n < batch; ++n) {
    const T* xp = x.data.data() + static_cast<std::size_t>(n) * fin;
    for (int o = 0; o < fout; ++o) {
      const T* wp = w.data.data() + static_cast<std::size_t>(o) * fin;
      T acc = b.data[o];
      for (int f = 0; f < fin; ++f) acc += wp[f] * xp[f];
      y.data[static_cast<std::size_t>(n) * fout + o] = acc;
    }
  }
}

template <typename T>
void linear_backward(const TensorT<T>& x, const TensorT<T>& w,
                     const TensorT<T>& gy,
                     std::type_identity_t<TensorT<T>>* gx,
                     std::type_identity_t<TensorT<T>>* gw,
                     std::type_identity_t<TensorT<T>>* gb) {
  const int batch = x.dim(0), fin = x.dim(1), fout = w.dim(0);
  detail::require<T>(gy.shape == std::vector<int>({batch, fout}),
                     "linear backward: upstream shape mismatch");
  if (gx) *gx = TensorT<T>({batch, fin});
  if (gw) *gw = TensorT<T>(w.shape);
  if (gb) *gb = TensorT<T>({fout});
  for (int n = 0; n < batch; ++n) {
    const T* xp = x.data.data() + static_cast<std::size_t>(n) * fin;
    const T* gyp = gy.data.data() + static_cast<std::size_t>(n) * fout;
    T* gxp = gx ? gx->data.data() + static_cast<std::size_t>(n) * fin : nullptr;
    for (int o = 0; o < fout; ++o) {
      const T g = gyp[o];
      const T* wp = w.data.data() + static_cast<std::size_t>(o) * fin;
      T* gwp = gw ? gw->data.data() + static_cast<std::size_t>(o) * fin : nullptr;
      if (gb) gb->data[o] += g;
      for (int f = 0; f < fin; ++f) {
        if (gxp) gxp[f] += wp[f] * g;
        if (gwp) gwp[f] += xp[f] * g;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Softmax cross-entropy over N,K logits; mean reduction.

template <typename T>
T softmax_cross_entropy(const TensorT<T>& logits, const std::vector<int>& labels,
                        std::type_identity_t<TensorT<T>>* grad) {
  detail::require<T>(logits.shape.size() == 2, "softmax: logits must be N,K");
  const int batch = logits.dim(0), k = logits.dim(1);
  detail::require<T>(static_cast<int>(labels.size()) == batch,
                     "softmax: label count mismatch");
  if (grad) *grad = TensorT<T>(logits.shape);
  double loss = 0.0;
  std::vector<double> p(k);
  for (int n = 0; n < batch; ++n) {
    if (labels[n] < 0 || labels[n] >= k) {
      throw std::out_of_range("softmax: label out of range");
    }
    const T* lp = logits.data.data() + static_cast<std::size_t>(n) * k;
    double maxv = lp[0];
    for (int i = 1; i < k; ++i) maxv = std::max(maxv, static_cast<double>(lp[i]));
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      p[i] = std::exp(static_cast<double>(lp[i]) - maxv);
      sum += p[i];
    }
    loss -= std::log(p[labels[n]] / sum);
    if (grad) {
      T* gp = grad->data.data() + static_cast<std::size_t>(n) * k;
      for (int i = 0; i < k; ++i) {
        const double soft = p[i] / sum;
        gp[i] = static_cast<T>((soft - (i == labels[n] ? 1.0 : 0.0)) / batch);
      }
    }
  }
  return static_cast<T>(loss / batch);
}

/// Softmax probabilities of one logit row (used by tests and inference).
template <typename T>
std::vector<double> softmax_row(const T* logits, int k) {
  double maxv = logits[0];
  for (int i = 1; i < k; ++i) maxv = std::max(maxv, static_cast<double>(logits[i]));
  std::vector<double> p(k);
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    p[i] = std::exp(static_cast<double>(logits[i]) - maxv);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace rotorvib::nn
