#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "rotorvib/dsp.hpp"
#include "rotorvib/nn/train.hpp"
#include "rotorvib/signal.hpp"

namespace rotorvib::pipeline {

/// Invalid configuration or arguments (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { Stft, Mfcc, Features };

std::string_view to_string(Mode m);
Mode mode_from_string(std::string_view name);

struct SegmentationConfig {
  double unit_seconds = 0.48;
  int window_samples = kDefaultWindowSamples;
};

struct ImagingConfig {
  double range_db = 80.0;
  int canvas_width = 432;
  int canvas_height = 288;
  int output_side = 298;
  std::string colormap_path;  // empty -> built-in table
};

struct RunConfig {
  std::uint64_t seed = 0;
  bool deterministic = true;
  std::string out_dir = "out";
  RotorConfig rotor;
  double duration_s = 30.0;
  SegmentationConfig segmentation;
  SplitCounts split;
  StftConfig stft;
  MelConfig mel;
  ImagingConfig imaging;
  Mode mode = Mode::Stft;
  double width_factor = 1.0;
  int input_side = 298;
  nn::TrainConfig train;
  std::vector<int> mlp_hidden = {64, 32};

  void validate() const;
};

/// Strict parse: unknown keys are rejected, missing keys fall back to the
/// paper-profile defaults above.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string run_config_to_json(const RunConfig& cfg);

/// FNV-1a over the canonical serialized form of the fields that shape each
/// stage's outputs. Changing any such field changes the fingerprint.
std::string fingerprint_gen(const RunConfig& cfg);
std::string fingerprint_preprocess(const RunConfig& cfg, Mode mode);

}  // namespace rotorvib::pipeline
