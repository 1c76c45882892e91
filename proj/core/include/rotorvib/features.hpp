#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

namespace rotorvib {

inline constexpr int kFeatureCount = 30;

/// Names in value order: 15 time-domain statistics followed by 15 spectral
/// statistics of the Hann-windowed magnitude spectrum.
extern const std::array<std::string_view, kFeatureCount> kFeatureNames;

struct FeatureVector {
  std::array<double, kFeatureCount> values{};
};

/// Engineered features of one sample window. Spectral values come from a
/// single DFT of the Hann-windowed window, zero-padded to twice the next
/// power of two so the +/-5 Hz harmonic bands always contain bins.
FeatureVector extract_features(std::span<const float> window,
                               double sample_rate, double rotation_hz);

/// Z-score parameters learned from the training split only. Features whose
/// training standard deviation is zero are dropped and recorded in the mask.
struct FeatureScaler {
  std::array<double, kFeatureCount> mean{};
  std::array<double, kFeatureCount> stddev{};
  std::array<bool, kFeatureCount> kept{};

  int kept_count() const;
};

FeatureScaler fit_scaler(const std::vector<FeatureVector>& train);

/// Standardized values of the kept features, in feature order.
std::vector<double> apply_scaler(const FeatureScaler& scaler,
                                 const FeatureVector& v);

}  // namespace rotorvib
