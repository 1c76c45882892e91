#pragma once

// Shared run-configuration presets for the test binaries.

#include <string>

namespace testcfg {

/// Small end-to-end profile: low sample rate, short recordings, tiny model.
inline std::string mini(const std::string& out_dir, unsigned seed = 5) {
  return R"({
    "seed": )" + std::to_string(seed) + R"(,
    "out_dir": ")" + out_dir + R"(",
    "rotor": {"sample_rate": 16384.0, "channels": 2, "duration_s": 3.0},
    "segmentation": {"unit_seconds": 0.48, "window_samples": 983},
    "split": {
      "train": {"normal": 20, "unbalance": 20, "misalignment": 20, "rubbing": 20},
      "test": {"normal": 6, "unbalance": 6, "misalignment": 6, "rubbing": 6}
    },
    "stft": {"window_length": 256, "fft_size": 256, "hop": 128},
    "mel": {"n_filters": 20, "f_min": 0.0, "f_max": 8192.0},
    "imaging": {"output_side": 32},
    "model": {"width_factor": 0.0625, "input_side": 32},
    "train": {"base_lr": 0.02, "batch_size": 4, "warmup_epochs": 1,
              "weight_decay": 0.0005, "epochs": 2, "milestones": [],
              "momentum": 0.9}
  })";
}

/// Desk profile: paper-default dataset, reduced model width and input side
/// so training finishes on a desktop CPU in minutes.
inline std::string desk(const std::string& out_dir) {
  return R"({
    "seed": 7,
    "out_dir": ")" + out_dir + R"(",
    "imaging": {"output_side": 64},
    "model": {"width_factor": 0.125, "input_side": 64},
    "train": {"base_lr": 0.1, "batch_size": 4, "warmup_epochs": 10,
              "weight_decay": 0.0005, "epochs": 15, "milestones": [],
              "momentum": 0.9}
  })";
}

}  // namespace testcfg
