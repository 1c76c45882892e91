#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rotorvib {

enum class FaultClass : int {
  Normal = 0,
  Unbalance = 1,
  Misalignment = 2,
  Rubbing = 3,
};

inline constexpr int kNumClasses = 4;
inline constexpr std::array<FaultClass, kNumClasses> kAllClasses = {
    FaultClass::Normal, FaultClass::Unbalance, FaultClass::Misalignment,
    FaultClass::Rubbing};

constexpr int class_index(FaultClass c) { return static_cast<int>(c); }
std::string_view to_string(FaultClass c);
FaultClass fault_class_from_string(std::string_view name);

/// Harmonic signature of one machine condition. amplitudes[h-1] is the
/// amplitude of harmonic h of the rotation frequency; clip_fraction > 0
/// truncates positive excursions at that fraction of the unclipped peak.
struct ClassSignature {
  std::vector<double> amplitudes;
  double clip_fraction = 0.0;  // 0 disables clipping, otherwise in (0, 1]
  double noise_sigma = 0.0;

  void validate() const;
};

struct RotorConfig {
  double rpm = 2000.0;
  double sample_rate = 65536.0;
  int channels = 4;
  std::array<ClassSignature, kNumClasses> class_params;
  std::uint64_t seed = 0;

  double rotation_hz() const { return rpm / 60.0; }
  void validate() const;
};

/// Rig defaults: 1X-dominant Normal, raised 1X for Unbalance, strong 2X for
/// Misalignment, and a clipped 8-harmonic comb for Rubbing.
RotorConfig default_rotor_config(std::uint64_t seed = 0);

struct TimeSeries {
  std::vector<float> samples;
  double sample_rate = 0.0;
  int channel_id = 0;
  FaultClass label = FaultClass::Normal;
  std::string source_id;
};

/// One 0.48 s dataset unit, viewing into its parent recording.
struct UnitSlice {
  std::span<const float> samples;
  FaultClass label = FaultClass::Normal;
  int channel_id = 0;
  int unit_index = 0;
};

/// One training example: a short window cut from a unit.
struct SampleWindow {
  std::vector<float> samples;
  FaultClass label = FaultClass::Normal;
  int unit_index = 0;
  int window_index = 0;
  int channel_id = 0;
};

/// Default window length: 0.06 s at 65536 Hz, rounded down to whole samples
/// (two shaft revolutions at 2000 RPM).
inline constexpr int kDefaultWindowSamples = 3932;

/// Windows cut from one unit; the arithmetic leaves room for 15 half-
/// overlapped windows but the dataset convention keeps the first 14.
inline constexpr int kWindowsPerUnit = 14;

/// Deterministic synthetic recording: sum of rotation-frequency harmonics
/// with per-channel phases hashed from (seed, channel, harmonic), plus
/// Gaussian noise; Rubbing-style clipping applied last.
TimeSeries synthesize_recording(FaultClass cls, const RotorConfig& cfg,
                                double duration_s, int channel);

/// Consecutive non-overlapping unit slices of floor(unit_seconds *
/// sample_rate) samples; the trailing remainder is discarded.
std::vector<UnitSlice> segment_units(const TimeSeries& ts, double unit_seconds);

/// Exactly kWindowsPerUnit windows of window_length samples at 50% overlap,
/// window i starting at i * (window_length / 2).
std::vector<SampleWindow> segment_samples(const UnitSlice& unit,
                                          int window_length);

struct SplitCounts {
  std::array<int, kNumClasses> train{};
  std::array<int, kNumClasses> test{};
};

/// Index lists into the window vector passed to split_dataset.
struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::array<int, kNumClasses> train_per_class{};
  std::array<int, kNumClasses> test_per_class{};
};

/// Unit-level split: whole units are shuffled per class and assigned to one
/// side, then truncated to the requested counts, so no two windows of a unit
/// end up on opposite sides.
DatasetSplit split_dataset(const std::vector<SampleWindow>& windows,
                           const SplitCounts& counts, std::uint64_t seed);

/// Train/test counts from the rig experiment (Normal, Unbalance,
/// Misalignment, Rubbing): 844 train + 212 test = 1056.
SplitCounts default_split_counts();

}  // namespace rotorvib
