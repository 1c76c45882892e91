#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "rotorvib/features.hpp"
#include "rotorvib/imaging.hpp"
#include "rotorvib/metrics.hpp"
#include "rotorvib/pipeline/config.hpp"
#include "rotorvib/pipeline/manifest.hpp"

namespace rotorvib::pipeline {

/// Exclusive lock file in the output directory; concurrent invocations on
/// the same directory fail instead of interleaving writes.
class DirLock {
 public:
  explicit DirLock(const std::filesystem::path& out_dir);
  ~DirLock();
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  std::filesystem::path path_;
};

/// Synthesize recordings, segment, split, and write raw files plus the
/// dataset manifest. Deterministic per seed.
DatasetManifest cmd_gen(const RunConfig& cfg);

/// Convert every manifest example to its image (stft/mfcc) or feature-table
/// representation. A rerun with an unchanged fingerprint is a no-op.
void cmd_preprocess(const RunConfig& cfg, Mode mode);

/// Train the classifier for the mode (VGG19-GAP on images, the MLP baseline
/// on features) on the train split and write ckpt_<mode>/.
void cmd_train(const RunConfig& cfg, Mode mode, std::ostream* progress = nullptr);

/// Run inference on the test split and write report_<mode>.json/.txt.
Report cmd_eval(const RunConfig& cfg, Mode mode);

/// Features path end to end: preprocess (if needed), train, eval.
Report cmd_baseline(const RunConfig& cfg, std::ostream* progress = nullptr);

/// Combined per-class table of several stored reports.
std::string cmd_report(const std::vector<std::filesystem::path>& report_files);

/// One inspection image for a raw window file.
void cmd_render(const RunConfig& cfg, Mode mode,
                const std::filesystem::path& window_f32,
                const std::filesystem::path& out_image);

void save_report(const Report& report, const std::filesystem::path& json_path);
Report load_report(const std::filesystem::path& json_path);

/// Feature table I/O: header row of the 30 feature names, one
/// comma-separated row per example.
void write_features_csv(const std::filesystem::path& path,
                        const std::vector<FeatureVector>& rows);
std::vector<FeatureVector> read_features_csv(const std::filesystem::path& path);

/// Deterministic window -> image chain shared by preprocess and render.
ImageRGB window_to_image(std::span<const float> window, const RunConfig& cfg,
                         Mode mode, const ColorMap& cmap);

std::string checkpoint_dir_name(Mode mode);
std::string report_basename(Mode mode);
std::string model_label(Mode mode);

}  // namespace rotorvib::pipeline
