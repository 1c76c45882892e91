#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rotorvib/signal.hpp"

namespace rotorvib::pipeline {

struct RecordingRef {
  FaultClass cls = FaultClass::Normal;
  int channel = 0;
  std::string path;  // relative to the output directory
  std::int64_t samples = 0;
};

struct ExampleRef {
  std::string id;
  FaultClass cls = FaultClass::Normal;
  int channel = 0;
  int unit = 0;
  int window = 0;
  std::string raw_path;         // recording file holding this window
  std::int64_t offset = 0;      // window start, in samples
  std::string split;            // "train" or "test"
  std::string image_stft;       // set by preprocess
  std::string image_mfcc;
  int feature_row = -1;         // row in features.csv
};

struct DatasetManifest {
  std::string config_fingerprint;
  std::uint64_t seed = 0;
  double sample_rate = 0.0;
  double rpm = 0.0;
  int window_samples = 0;
  std::vector<RecordingRef> recordings;
  std::vector<ExampleRef> examples;
  // mode name -> fingerprint of the preprocess stage that produced it
  std::map<std::string, std::string> preprocess_fingerprints;

  std::vector<std::size_t> split_indices(std::string_view split) const;
};

inline constexpr const char* kManifestFile = "manifest.json";

void save_manifest(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

}  // namespace rotorvib::pipeline
