#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "rotorvib/features.hpp"
#include "rotorvib/nn/model.hpp"
#include "rotorvib/nn/train.hpp"

namespace rotorvib::nn {

/// Checkpoint layout: checkpoint.json (layer list, config, seed, trace,
/// running statistics, optional feature scaler) next to params.bin, a blob
/// of 32-bit little-endian parameters in layer order. Round-trips bit-exact.
struct CheckpointMeta {
  TrainConfig train_cfg;
  std::uint64_t seed = 0;
  TrainTrace trace;
  std::optional<FeatureScaler> scaler;
  std::string label;
};

inline constexpr const char* kCheckpointJson = "checkpoint.json";
inline constexpr const char* kCheckpointBlob = "params.bin";

void save_checkpoint(const std::filesystem::path& dir, const Model& model,
                     const CheckpointMeta& meta);

struct LoadedCheckpoint {
  Model model;
  CheckpointMeta meta;
};

/// Throws if the blob length does not equal count_parameters * 4 bytes.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace rotorvib::nn
