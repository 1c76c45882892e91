#include "rotorvib/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rotorvib {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

Matrix transposed(const Matrix& m) {
  Matrix t(m.cols, m.rows);
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) t.at(c, r) = m.at(r, c);
  return t;
}

std::vector<double> hann_window(int length) {
  if (length < 2) throw std::invalid_argument("hann_window: length must be >= 2");
  std::vector<double> w(length);
  for (int m = 0; m < length; ++m) {
    w[m] = 0.5 * (1.0 - std::cos(2.0 * kPi * m / length));
  }
  return w;
}

void fft_inplace(std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  if (!is_pow2(n)) {
    throw std::invalid_argument("fft: length must be a power of two");
  }
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  if (n < 2) return;
  // Per-index twiddles from std::polar keep the error ~1 ulp per entry
  // instead of growing along a recurrence.
  std::vector<std::complex<double>> twiddle(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    twiddle[k] = std::polar(1.0, -2.0 * kPi * static_cast<double>(k) /
                                     static_cast<double>(n));
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t base = 0; base < n; base += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = x[base + k];
        const auto v = x[base + k + len / 2] * twiddle[k * stride];
        x[base + k] = u + v;
        x[base + k + len / 2] = u - v;
      }
    }
  }
}

void ifft_inplace(std::vector<std::complex<double>>& x) {
  for (auto& v : x) v = std::conj(v);
  fft_inplace(x);
  const double inv = 1.0 / static_cast<double>(x.size());
  for (auto& v : x) v = std::conj(v) * inv;
}

std::vector<std::complex<double>> fft(std::vector<std::complex<double>> x) {
  fft_inplace(x);
  return x;
}

void StftConfig::validate() const {
  if (window_length <= 0 || window_length > fft_size) {
    throw std::invalid_argument("stft: need 0 < window_length <= fft_size");
  }
  if (hop <= 0) throw std::invalid_argument("stft: hop must be positive");
  if (!is_pow2(static_cast<std::size_t>(fft_size))) {
    throw std::invalid_argument("stft: fft_size must be a power of two");
  }
}

Spectrogram stft(std::span<const float> x, const StftConfig& cfg,
                 double sample_rate) {
  cfg.validate();
  const int L = cfg.window_length;
  const int N = cfg.fft_size;
  const int H = cfg.hop;
  if (static_cast<int>(x.size()) < L) {
    throw std::invalid_argument("stft: signal shorter than the analysis window");
  }
  const int frames = static_cast<int>((x.size() - L) / H) + 1;
  const int bins = N / 2 + 1;
  const auto window = hann_window(L);

  Spectrogram out;
  out.magnitudes = Matrix(frames, bins);
  out.bin_hz = sample_rate / N;
  out.frame_seconds = H / sample_rate;

  std::vector<std::complex<double>> buf(N);
  for (int f = 0; f < frames; ++f) {
    const std::size_t base = static_cast<std::size_t>(f) * H;
    for (int m = 0; m < L; ++m) {
      buf[m] = window[m] * static_cast<double>(x[base + m]);
    }
    std::fill(buf.begin() + L, buf.end(), std::complex<double>(0.0, 0.0));
    fft_inplace(buf);
    for (int k = 0; k < bins; ++k) out.magnitudes.at(f, k) = std::abs(buf[k]);
  }
  return out;
}

double mel_from_hz(double f) {
  if (f < 0.0) throw std::invalid_argument("mel_from_hz: frequency must be >= 0");
  return 2595.0 * std::log10(1.0 + f / 700.0);
}

double hz_from_mel(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

void MelConfig::validate(double sample_rate) const {
  if (n_filters < 2) throw std::invalid_argument("mel: n_filters must be >= 2");
  if (f_min < 0.0 || f_min >= f_max) {
    throw std::invalid_argument("mel: need 0 <= f_min < f_max");
  }
  if (f_max > sample_rate / 2.0 + 1e-9) {
    throw std::invalid_argument("mel: f_max exceeds Nyquist");
  }
}

std::vector<double> mel_filter_centers_hz(const MelConfig& cfg) {
  const double lo = mel_from_hz(cfg.f_min);
  const double hi = mel_from_hz(cfg.f_max);
  std::vector<double> centers(cfg.n_filters);
  for (int j = 1; j <= cfg.n_filters; ++j) {
    centers[j - 1] = hz_from_mel(lo + (hi - lo) * j / (cfg.n_filters + 1));
  }
  return centers;
}

Matrix mel_filterbank(const MelConfig& cfg, int fft_size, double sample_rate) {
  cfg.validate(sample_rate);
  const int bins = fft_size / 2 + 1;
  const int nf = cfg.n_filters;
  const double lo = mel_from_hz(cfg.f_min);
  const double hi = mel_from_hz(cfg.f_max);
  const double dm = (hi - lo) / (nf + 1);

  Matrix fb(nf, bins);
  for (int k = 0; k < bins; ++k) {
    const double mel_k = mel_from_hz(k * sample_rate / fft_size);
    for (int j = 1; j <= nf; ++j) {
      const double center = lo + dm * j;
      const double w = 1.0 - std::abs(mel_k - center) / dm;
      if (w > 0.0) fb.at(j - 1, k) = w;
    }
  }
  // Peak-normalize each row so the discrete maximum is exactly 1; a row with
  // no bins inside its support stays zero.
  for (int j = 0; j < nf; ++j) {
    double peak = 0.0;
    for (int k = 0; k < bins; ++k) peak = std::max(peak, fb.at(j, k));
    if (peak > 0.0) {
      for (int k = 0; k < bins; ++k) fb.at(j, k) /= peak;
    }
  }
  return fb;
}

MfccMatrix mfcc(std::span<const float> x, const StftConfig& stft_cfg,
                const MelConfig& mel_cfg, double sample_rate) {
  if (mel_cfg.n_filters < kMfccKeptCoeffs + 1) {
    throw std::invalid_argument("mfcc: need at least 13 mel filters");
  }
  const Spectrogram spec = stft(x, stft_cfg, sample_rate);
  const Matrix fb = mel_filterbank(mel_cfg, stft_cfg.fft_size, sample_rate);
  const int frames = spec.frames();
  const int bins = spec.bins();
  const int nf = mel_cfg.n_filters;
  const double n = static_cast<double>(stft_cfg.fft_size);

  // Orthonormal DCT-II scale factors.
  const double s0 = std::sqrt(1.0 / nf);
  const double si = std::sqrt(2.0 / nf);

  MfccMatrix out;
  out.coefficients = Matrix(kMfccKeptCoeffs, frames);
  std::vector<double> log_energy(nf);
  for (int f = 0; f < frames; ++f) {
    for (int j = 0; j < nf; ++j) {
      double e = 0.0;
      for (int k = 0; k < bins; ++k) {
        const double mag = spec.magnitudes.at(f, k);
        e += fb.at(j, k) * (mag * mag / n);
      }
      log_energy[j] = std::log(std::max(e, kLogEnergyFloor));
    }
    for (int i = 1; i <= kMfccKeptCoeffs; ++i) {
      double acc = 0.0;
      for (int j = 0; j < nf; ++j) {
        acc += log_energy[j] * std::cos(kPi * i * (2 * j + 1) / (2.0 * nf));
      }
      out.coefficients.at(i - 1, f) = (i == 0 ? s0 : si) * acc;
    }
  }
  return out;
}

}  // namespace rotorvib
