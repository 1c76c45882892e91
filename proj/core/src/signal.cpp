#include "rotorvib/signal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "rotorvib/rng.hpp"

namespace rotorvib {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

std::string_view to_string(FaultClass c) {
  switch (c) {
    case FaultClass::Normal: return "normal";
    case FaultClass::Unbalance: return "unbalance";
    case FaultClass::Misalignment: return "misalignment";
    case FaultClass::Rubbing: return "rubbing";
  }
  throw std::invalid_argument("unknown fault class");
}

FaultClass fault_class_from_string(std::string_view name) {
  for (const FaultClass c : kAllClasses) {
    if (to_string(c) == name) return c;
  }
  throw std::invalid_argument("unknown fault class: " + std::string(name));
}

void ClassSignature::validate() const {
  if (amplitudes.empty()) {
    throw std::invalid_argument("class signature needs at least one harmonic");
  }
  for (const double a : amplitudes) {
    if (!(a >= 0.0)) throw std::invalid_argument("harmonic amplitude must be >= 0");
  }
  if (clip_fraction != 0.0 && !(clip_fraction > 0.0 && clip_fraction <= 1.0)) {
    throw std::invalid_argument("clip_fraction must be in (0, 1] or 0");
  }
  if (!(noise_sigma >= 0.0)) {
    throw std::invalid_argument("noise_sigma must be >= 0");
  }
}

void RotorConfig::validate() const {
  if (!(rpm > 0.0)) throw std::invalid_argument("rpm must be positive");
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample_rate must be positive");
  if (channels < 1) throw std::invalid_argument("channels must be >= 1");
  for (const auto& sig : class_params) sig.validate();
}

RotorConfig default_rotor_config(std::uint64_t seed) {
  RotorConfig cfg;
  cfg.seed = seed;
  cfg.class_params[class_index(FaultClass::Normal)] = {{1.0, 0.1}, 0.0, 0.05};
  cfg.class_params[class_index(FaultClass::Unbalance)] = {{3.0, 0.15}, 0.0, 0.05};
  cfg.class_params[class_index(FaultClass::Misalignment)] = {{1.2, 2.0}, 0.0, 0.05};
  ClassSignature rubbing;
  rubbing.amplitudes.resize(8);
  for (int h = 1; h <= 8; ++h) rubbing.amplitudes[h - 1] = 1.5 / h;
  rubbing.clip_fraction = 0.6;
  rubbing.noise_sigma = 0.08;
  cfg.class_params[class_index(FaultClass::Rubbing)] = rubbing;
  return cfg;
}

TimeSeries synthesize_recording(FaultClass cls, const RotorConfig& cfg,
                                double duration_s, int channel) {
  cfg.validate();
  if (!(duration_s > 0.0)) {
    throw std::invalid_argument("duration must be positive");
  }
  if (channel < 0 || channel >= cfg.channels) {
    throw std::out_of_range("channel out of range");
  }
  const auto& sig = cfg.class_params[class_index(cls)];
  const auto n = static_cast<std::size_t>(duration_s * cfg.sample_rate);
  const double f_r = cfg.rotation_hz();
  const double dt = 1.0 / cfg.sample_rate;

  // Per-channel, per-harmonic phases hashed from the seed so channels are
  // distinct but reproducible.
  std::vector<double> phase(sig.amplitudes.size());
  for (std::size_t h = 1; h <= sig.amplitudes.size(); ++h) {
    const auto label = "phase/" + std::to_string(channel) + "/" + std::to_string(h);
    Rng r(substream_seed(cfg.seed, label));
    phase[h - 1] = kTwoPi * r.uniform01();
  }

  std::vector<double> harmonic_sum(n, 0.0);
  for (std::size_t h = 1; h <= sig.amplitudes.size(); ++h) {
    const double a = sig.amplitudes[h - 1];
    if (a == 0.0) continue;
    const double w = kTwoPi * h * f_r;
    for (std::size_t i = 0; i < n; ++i) {
      harmonic_sum[i] += a * std::sin(w * (i * dt) + phase[h - 1]);
    }
  }

  double clip_level = 0.0;
  const bool clipped = sig.clip_fraction > 0.0;
  if (clipped) {
    double peak = 0.0;
    for (const double v : harmonic_sum) peak = std::max(peak, v);
    clip_level = sig.clip_fraction * peak;
  }

  const auto noise_label = "gen/" + std::string(to_string(cls)) + "/" +
                           std::to_string(channel);
  Rng noise(substream_seed(cfg.seed, noise_label));

  TimeSeries ts;
  ts.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = harmonic_sum[i];
    if (sig.noise_sigma > 0.0) v += sig.noise_sigma * noise.gaussian();
    if (clipped && v > clip_level) v = clip_level;
    ts.samples[i] = static_cast<float>(v);
  }
  ts.sample_rate = cfg.sample_rate;
  ts.channel_id = channel;
  ts.label = cls;
  ts.source_id = std::string(to_string(cls)) + "-ch" + std::to_string(channel);
  return ts;
}

std::vector<UnitSlice> segment_units(const TimeSeries& ts, double unit_seconds) {
  const auto unit_len = static_cast<std::size_t>(unit_seconds * ts.sample_rate);
  if (unit_len == 0) {
    throw std::invalid_argument("unit_seconds too small for the sample rate");
  }
  if (ts.samples.size() < unit_len) {
    throw std::invalid_argument("recording shorter than one unit");
  }
  const std::size_t count = ts.samples.size() / unit_len;
  std::vector<UnitSlice> units;
  units.reserve(count);
  for (std::size_t u = 0; u < count; ++u) {
    units.push_back(UnitSlice{
        std::span<const float>(ts.samples).subspan(u * unit_len, unit_len),
        ts.label, ts.channel_id, static_cast<int>(u)});
  }
  return units;
}

std::vector<SampleWindow> segment_samples(const UnitSlice& unit,
                                          int window_length) {
  if (window_length < 2) {
    throw std::invalid_argument("window_length must be >= 2");
  }
  const int hop = window_length / 2;
  const std::size_t needed =
      static_cast<std::size_t>(kWindowsPerUnit - 1) * hop + window_length;
  if (unit.samples.size() < needed) {
    throw std::invalid_argument("unit too short for 14 half-overlapped windows");
  }
  std::vector<SampleWindow> windows;
  windows.reserve(kWindowsPerUnit);
  for (int i = 0; i < kWindowsPerUnit; ++i) {
    SampleWindow w;
    const auto begin = unit.samples.begin() + static_cast<std::size_t>(i) * hop;
    w.samples.assign(begin, begin + window_length);
    w.label = unit.label;
    w.unit_index = unit.unit_index;
    w.window_index = i;
    w.channel_id = unit.channel_id;
    windows.push_back(std::move(w));
  }
  return windows;
}

SplitCounts default_split_counts() {
  SplitCounts c;
  c.train = {229, 205, 211, 199};
  c.test = {43, 55, 53, 61};
  return c;
}

DatasetSplit split_dataset(const std::vector<SampleWindow>& windows,
                           const SplitCounts& counts, std::uint64_t seed) {
  for (int c = 0; c < kNumClasses; ++c) {
    if (counts.train[c] < 0 || counts.test[c] < 0) {
      throw std::invalid_argument("split counts must be nonnegative");
    }
  }

  // Group window indices by (class, channel, unit). Assumes one recording
  // per (class, channel), which the generation pipeline guarantees.
  std::array<std::map<std::pair<int, int>, std::vector<std::size_t>>,
             kNumClasses>
      units_by_class;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& w = windows[i];
    units_by_class[class_index(w.label)][{w.channel_id, w.unit_index}]
        .push_back(i);
  }

  DatasetSplit split;
  for (const FaultClass cls : kAllClasses) {
    const int c = class_index(cls);
    std::vector<const std::vector<std::size_t>*> units;
    units.reserve(units_by_class[c].size());
    for (const auto& [key, idxs] : units_by_class[c]) units.push_back(&idxs);

    Rng rng(substream_seed(seed, "split/" + std::string(to_string(cls))));
    rng.shuffle(units);

    std::size_t next_unit = 0;
    auto take = [&](int target, std::vector<std::size_t>& out, int& taken) {
      while (taken < target) {
        if (next_unit >= units.size()) {
          throw std::invalid_argument(
              "insufficient windows of class " + std::string(to_string(cls)) +
              " for the requested split");
        }
        const auto& unit = *units[next_unit++];
        for (const std::size_t idx : unit) {
          if (taken == target) break;  // truncated tail stays unused
          out.push_back(idx);
          ++taken;
        }
      }
    };
    int taken_train = 0;
    int taken_test = 0;
    take(counts.train[c], split.train, taken_train);
    take(counts.test[c], split.test, taken_test);
    split.train_per_class[c] = taken_train;
    split.test_per_class[c] = taken_test;
  }
  return split;
}

}  // namespace rotorvib
