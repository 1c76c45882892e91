#include "rotorvib/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "rotorvib/dsp.hpp"

namespace rotorvib {

const std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "mean",
    "abs_mean",
    "rms",
    "std",
    "variance",
    "skewness",
    "kurtosis",
    "maximum",
    "minimum",
    "peak_to_peak",
    "crest_factor",
    "shape_factor",
    "impulse_factor",
    "clearance_factor",
    "energy",
    "spectral_mean",
    "spectral_std",
    "spectral_skewness",
    "spectral_kurtosis",
    "spectral_centroid",
    "spectral_rms",
    "spectral_peak_magnitude",
    "peak_frequency_hz",
    "band_power_1x",
    "band_power_2x",
    "band_power_3x",
    "band_power_4x",
    "band_power_5x",
    "spectral_entropy",
    "band_ratio_2x_1x",
};

namespace {

constexpr double kBandHalfWidthHz = 5.0;

struct Moments {
  double mean = 0.0;
  double var = 0.0;   // population
  double skew = 0.0;  // 0 when variance is 0
  double exkurt = 0.0;
};

Moments moments(std::span<const double> xs) {
  Moments m;
  const double n = static_cast<double>(xs.size());
  for (const double x : xs) m.mean += x;
  m.mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (const double x : xs) {
    const double d = x - m.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.var = m2;
  if (m2 > 0.0) {
    const double sd = std::sqrt(m2);
    m.skew = m3 / (sd * sd * sd);
    m.exkurt = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

FeatureVector extract_features(std::span<const float> window,
                               double sample_rate, double rotation_hz) {
  const std::size_t n = window.size();
  if (n < 8) throw std::invalid_argument("extract_features: window too short");

  std::vector<double> x(window.begin(), window.end());

  const Moments tm = moments(x);
  double abs_mean = 0.0, energy = 0.0, sqrt_mean = 0.0;
  double maxv = x[0], minv = x[0];
  for (const double v : x) {
    abs_mean += std::abs(v);
    energy += v * v;
    sqrt_mean += std::sqrt(std::abs(v));
    maxv = std::max(maxv, v);
    minv = std::min(minv, v);
  }
  abs_mean /= static_cast<double>(n);
  sqrt_mean /= static_cast<double>(n);
  const double rms = std::sqrt(energy / static_cast<double>(n));
  const double sd = std::sqrt(tm.var);
  const double peak = std::max(std::abs(maxv), std::abs(minv));
  const double clearance_denom = sqrt_mean * sqrt_mean;

  // Magnitude spectrum of the Hann-windowed window, zero-padded for finer
  // bin spacing (8 Hz at the default 3932-sample window).
  const auto hann = hann_window(static_cast<int>(n));
  const std::size_t nfft = 2 * next_pow2(n);
  std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) buf[i] = hann[i] * x[i];
  fft_inplace(buf);
  const std::size_t bins = nfft / 2 + 1;
  const double bin_hz = sample_rate / static_cast<double>(nfft);
  std::vector<double> mag(bins);
  for (std::size_t k = 0; k < bins; ++k) mag[k] = std::abs(buf[k]);

  const Moments sm = moments(mag);
  double mag_sum = 0.0, power_sum = 0.0, centroid_num = 0.0, spec_energy = 0.0;
  double peak_mag = 0.0;
  std::size_t peak_bin = 0;
  for (std::size_t k = 0; k < bins; ++k) {
    const double f = k * bin_hz;
    mag_sum += mag[k];
    centroid_num += f * mag[k];
    const double p = mag[k] * mag[k];
    power_sum += p;
    spec_energy += p;
    if (mag[k] > peak_mag) {
      peak_mag = mag[k];
      peak_bin = k;
    }
  }
  const double spectral_rms = std::sqrt(power_sum / static_cast<double>(bins));
  const double centroid = mag_sum > 0.0 ? centroid_num / mag_sum : 0.0;

  std::array<double, 5> band{};
  for (int h = 1; h <= 5; ++h) {
    const double f_lo = h * rotation_hz - kBandHalfWidthHz;
    const double f_hi = h * rotation_hz + kBandHalfWidthHz;
    double acc = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = k * bin_hz;
      if (f >= f_lo && f <= f_hi) acc += mag[k] * mag[k];
    }
    band[h - 1] = acc;
  }

  double entropy = 0.0;
  if (spec_energy > 0.0) {
    for (std::size_t k = 0; k < bins; ++k) {
      const double p = mag[k] * mag[k] / spec_energy;
      if (p > 0.0) entropy -= p * std::log(p);
    }
  }

  FeatureVector out;
  auto& v = out.values;
  v[0] = tm.mean;
  v[1] = abs_mean;
  v[2] = rms;
  v[3] = sd;
  v[4] = tm.var;
  v[5] = tm.skew;
  v[6] = tm.exkurt;
  v[7] = maxv;
  v[8] = minv;
  v[9] = maxv - minv;
  v[10] = rms > 0.0 ? peak / rms : 0.0;
  v[11] = abs_mean > 0.0 ? rms / abs_mean : 0.0;
  v[12] = abs_mean > 0.0 ? peak / abs_mean : 0.0;
  v[13] = clearance_denom > 0.0 ? peak / clearance_denom : 0.0;
  v[14] = energy;
  v[15] = sm.mean;
  v[16] = std::sqrt(sm.var);
  v[17] = sm.skew;
  v[18] = sm.exkurt;
  v[19] = centroid;
  v[20] = spectral_rms;
  v[21] = peak_mag;
  v[22] = peak_bin * bin_hz;
  v[23] = band[0];
  v[24] = band[1];
  v[25] = band[2];
  v[26] = band[3];
  v[27] = band[4];
  v[28] = entropy;
  v[29] = band[0] > 0.0 ? band[1] / band[0] : 0.0;
  for (const double val : v) {
    if (!std::isfinite(val)) {
      throw std::runtime_error("extract_features produced a non-finite value");
    }
  }
  return out;
}

int FeatureScaler::kept_count() const {
  return static_cast<int>(std::count(kept.begin(), kept.end(), true));
}

FeatureScaler fit_scaler(const std::vector<FeatureVector>& train) {
  if (train.empty()) throw std::invalid_argument("fit_scaler: empty training list");
  FeatureScaler s;
  const double n = static_cast<double>(train.size());
  for (int f = 0; f < kFeatureCount; ++f) {
    double mean = 0.0;
    for (const auto& v : train) mean += v.values[f];
    mean /= n;
    double var = 0.0;
    for (const auto& v : train) {
      const double d = v.values[f] - mean;
      var += d * d;
    }
    var /= n;
    s.mean[f] = mean;
    s.stddev[f] = std::sqrt(var);
    s.kept[f] = s.stddev[f] > 0.0;
  }
  return s;
}

std::vector<double> apply_scaler(const FeatureScaler& scaler,
                                 const FeatureVector& v) {
  std::vector<double> out;
  out.reserve(kFeatureCount);
  for (int f = 0; f < kFeatureCount; ++f) {
    if (!scaler.kept[f]) continue;
    out.push_back((v.values[f] - scaler.mean[f]) / scaler.stddev[f]);
  }
  return out;
}

}  // namespace rotorvib
