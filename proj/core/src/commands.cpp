#include "rotorvib/pipeline/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rotorvib/dsp.hpp"
#include "rotorvib/io.hpp"
#include "rotorvib/nn/checkpoint.hpp"
#include "rotorvib/rng.hpp"

namespace rotorvib::pipeline {

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

std::string format_id(FaultClass cls, int channel, int unit, int window) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%s-ch%d-u%03d-w%02d",
                std::string(to_string(cls)).c_str(), channel, unit, window);
  return buf;
}

std::string raw_name(FaultClass cls, int channel) {
  return "raw/" + std::string(to_string(cls)) + "_ch" +
         std::to_string(channel) + ".f32";
}

ColorMap resolve_colormap(const RunConfig& cfg) {
  if (cfg.imaging.colormap_path.empty()) return default_colormap();
  return load_colormap(cfg.imaging.colormap_path);
}

Matrix abs_matrix(const Matrix& m) {
  Matrix out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    out.data[i] = std::abs(m.data[i]);
  }
  return out;
}

std::vector<std::uint8_t> image_to_chw_bytes(const ImageRGB& img) {
  const int s = img.width;
  std::vector<std::uint8_t> out(3 * static_cast<std::size_t>(s) * s);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < s; ++y) {
      for (int x = 0; x < s; ++x) {
        out[(static_cast<std::size_t>(c) * s + y) * s + x] = img.at(y, x, c);
      }
    }
  }
  return out;
}

const std::string& image_path_for(const ExampleRef& e, Mode mode) {
  return mode == Mode::Stft ? e.image_stft : e.image_mfcc;
}

}  // namespace

std::string checkpoint_dir_name(Mode mode) {
  return "ckpt_" + std::string(to_string(mode));
}

std::string report_basename(Mode mode) {
  return "report_" + std::string(to_string(mode));
}

std::string model_label(Mode mode) {
  switch (mode) {
    case Mode::Stft: return "stft-vgg19gap";
    case Mode::Mfcc: return "mfcc-vgg19gap";
    case Mode::Features: return "mlp-baseline";
  }
  throw std::invalid_argument("unknown mode");
}

DirLock::DirLock(const fs::path& out_dir) : path_(out_dir / "lock") {
  fs::create_directories(out_dir);
  std::FILE* f = std::fopen(path_.string().c_str(), "wx");
  if (!f) {
    throw std::runtime_error(
        "output directory is locked by another invocation: " + path_.string());
  }
  std::fclose(f);
}

DirLock::~DirLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

ImageRGB window_to_image(std::span<const float> window, const RunConfig& cfg,
                         Mode mode, const ColorMap& cmap) {
  Matrix grid;
  if (mode == Mode::Stft) {
    const Spectrogram spec = stft(window, cfg.stft, cfg.rotor.sample_rate);
    grid = transposed(spec.magnitudes);  // rows = bins, low frequency first
  } else if (mode == Mode::Mfcc) {
    const MfccMatrix m = mfcc(window, cfg.stft, cfg.mel, cfg.rotor.sample_rate);
    grid = abs_matrix(m.coefficients);  // rows = coefficients 2..13
  } else {
    throw std::invalid_argument("window_to_image: mode must be stft or mfcc");
  }
  const Matrix norm = to_db_normalized(grid, cfg.imaging.range_db);
  const ImageRGB canvas =
      render(norm, cmap, cfg.imaging.canvas_width, cfg.imaging.canvas_height);
  return resize_bilinear(canvas, cfg.imaging.output_side,
                         cfg.imaging.output_side);
}

DatasetManifest cmd_gen(const RunConfig& cfg) {
  cfg.validate();
  const fs::path out(cfg.out_dir);
  DirLock lock(out);
  fs::create_directories(out / "raw");

  DatasetManifest manifest;
  manifest.config_fingerprint = fingerprint_gen(cfg);
  manifest.seed = cfg.seed;
  manifest.sample_rate = cfg.rotor.sample_rate;
  manifest.rpm = cfg.rotor.rpm;
  manifest.window_samples = cfg.segmentation.window_samples;

  // Catalog of every available window; samples stay in the raw files and
  // are re-sliced by offset downstream.
  std::vector<SampleWindow> catalog;
  std::vector<std::int64_t> catalog_offset;
  std::vector<std::string> catalog_raw;

  const int hop = cfg.segmentation.window_samples / 2;
  for (const FaultClass cls : kAllClasses) {
    for (int ch = 0; ch < cfg.rotor.channels; ++ch) {
      const TimeSeries ts =
          synthesize_recording(cls, cfg.rotor, cfg.duration_s, ch);
      const std::string rel = raw_name(cls, ch);
      write_f32(out / rel, ts.samples);
      const json meta = {{"class", std::string(to_string(cls))},
                         {"channel", ch},
                         {"sample_rate", cfg.rotor.sample_rate},
                         {"rpm", cfg.rotor.rpm},
                         {"seed", cfg.seed},
                         {"samples", ts.samples.size()},
                         {"duration_s", cfg.duration_s}};
      write_text(out / (rel + ".meta.json"), meta.dump(2) + "\n");
      manifest.recordings.push_back(
          {cls, ch, rel, static_cast<std::int64_t>(ts.samples.size())});

      const auto units = segment_units(ts, cfg.segmentation.unit_seconds);
      const auto unit_len = static_cast<std::int64_t>(units[0].samples.size());
      for (const auto& unit : units) {
        for (int w = 0; w < kWindowsPerUnit; ++w) {
          SampleWindow sw;  // catalog entry: ids only, samples stay on disk
          sw.label = cls;
          sw.unit_index = unit.unit_index;
          sw.window_index = w;
          sw.channel_id = ch;
          catalog.push_back(std::move(sw));
          catalog_offset.push_back(unit.unit_index * unit_len +
                                   static_cast<std::int64_t>(w) * hop);
          catalog_raw.push_back(rel);
        }
      }
    }
  }

  const DatasetSplit split = split_dataset(catalog, cfg.split, cfg.seed);

  std::vector<std::string> split_tag(catalog.size());
  for (const std::size_t i : split.train) split_tag[i] = "train";
  for (const std::size_t i : split.test) split_tag[i] = "test";

  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (split_tag[i].empty()) continue;
    const auto& w = catalog[i];
    ExampleRef e;
    e.id = format_id(w.label, w.channel_id, w.unit_index, w.window_index);
    e.cls = w.label;
    e.channel = w.channel_id;
    e.unit = w.unit_index;
    e.window = w.window_index;
    e.raw_path = catalog_raw[i];
    e.offset = catalog_offset[i];
    e.split = split_tag[i];
    manifest.examples.push_back(std::move(e));
  }

  save_manifest(manifest, out / kManifestFile);
  return manifest;
}

void cmd_preprocess(const RunConfig& cfg, Mode mode) {
  cfg.validate();
  const fs::path out(cfg.out_dir);
  DirLock lock(out);
  DatasetManifest manifest = load_manifest(out / kManifestFile);
  if (manifest.config_fingerprint != fingerprint_gen(cfg)) {
    throw std::runtime_error(
        "manifest fingerprint mismatch: dataset was generated with a "
        "different configuration; rerun gen");
  }
  const std::string fp = fingerprint_preprocess(cfg, mode);
  const std::string mode_name(to_string(mode));

  const auto it = manifest.preprocess_fingerprints.find(mode_name);
  if (it != manifest.preprocess_fingerprints.end() && it->second == fp) {
    bool complete = true;
    if (mode == Mode::Features) {
      complete = fs::exists(out / "features.csv");
    } else {
      for (const auto& e : manifest.examples) {
        const auto& rel = image_path_for(e, mode);
        if (rel.empty() || !fs::exists(out / rel)) {
          complete = false;
          break;
        }
      }
    }
    if (complete) return;  // unchanged config, outputs in place
  }

  // Group examples by recording so each raw file is read once.
  std::map<std::string, std::vector<std::size_t>> by_recording;
  for (std::size_t i = 0; i < manifest.examples.size(); ++i) {
    by_recording[manifest.examples[i].raw_path].push_back(i);
  }

  const int wlen = manifest.window_samples;
  if (mode == Mode::Features) {
    std::vector<FeatureVector> rows(manifest.examples.size());
    const double f_r = manifest.rpm / 60.0;
    for (const auto& [rel, idxs] : by_recording) {
      const auto samples = read_f32(out / rel);
      for (const std::size_t i : idxs) {
        auto& e = manifest.examples[i];
        if (e.offset + wlen > static_cast<std::int64_t>(samples.size())) {
          throw std::runtime_error("window exceeds recording: " + e.id);
        }
        rows[i] = extract_features(
            std::span<const float>(samples).subspan(
                static_cast<std::size_t>(e.offset), wlen),
            manifest.sample_rate, f_r);
        e.feature_row = static_cast<int>(i);
      }
    }
    write_features_csv(out / "features.csv", rows);
  } else {
    const ColorMap cmap = resolve_colormap(cfg);
    const std::string img_dir = "img_" + mode_name;
    fs::create_directories(out / img_dir);
    for (const auto& [rel, idxs] : by_recording) {
      const auto samples = read_f32(out / rel);
      for (const std::size_t i : idxs) {
        auto& e = manifest.examples[i];
        if (e.offset + wlen > static_cast<std::int64_t>(samples.size())) {
          throw std::runtime_error("window exceeds recording: " + e.id);
        }
        const ImageRGB img = window_to_image(
            std::span<const float>(samples).subspan(
                static_cast<std::size_t>(e.offset), wlen),
            cfg, mode, cmap);
        const std::string img_rel = img_dir + "/" + e.id + ".ppm";
        write_ppm(img, out / img_rel);
        (mode == Mode::Stft ? e.image_stft : e.image_mfcc) = img_rel;
      }
    }
  }

  manifest.preprocess_fingerprints[mode_name] = fp;
  save_manifest(manifest, out / kManifestFile);
}

namespace {

/// Loads the examples of one split into a dataset the trainer understands.
/// For the features mode a scaler must be supplied (eval) or fitted (train).
struct LoadedData {
  std::unique_ptr<nn::TensorDataset> data;
  std::vector<int> labels;
  std::optional<FeatureScaler> scaler;
};

LoadedData load_split(const RunConfig& cfg, const DatasetManifest& manifest,
                      Mode mode, std::string_view split,
                      const FeatureScaler* fixed_scaler) {
  const fs::path out(cfg.out_dir);
  const auto idxs = manifest.split_indices(split);
  if (idxs.empty()) {
    throw std::runtime_error("no examples tagged \"" + std::string(split) +
                             "\" in the manifest");
  }
  LoadedData loaded;
  if (mode == Mode::Features) {
    const auto rows = read_features_csv(out / "features.csv");
    std::vector<FeatureVector> split_rows;
    for (const std::size_t i : idxs) {
      const auto& e = manifest.examples[i];
      if (e.feature_row < 0 ||
          e.feature_row >= static_cast<int>(rows.size())) {
        throw std::runtime_error("missing feature row for " + e.id +
                                 "; run preprocess --mode features");
      }
      split_rows.push_back(rows[e.feature_row]);
      loaded.labels.push_back(class_index(e.cls));
    }
    FeatureScaler scaler =
        fixed_scaler ? *fixed_scaler : fit_scaler(split_rows);
    auto ds = std::make_unique<nn::FeatureDataset>(scaler.kept_count());
    for (std::size_t i = 0; i < split_rows.size(); ++i) {
      ds->add(apply_scaler(scaler, split_rows[i]), loaded.labels[i]);
    }
    loaded.scaler = scaler;
    loaded.data = std::move(ds);
  } else {
    auto ds = std::make_unique<nn::ImageDataset>(cfg.imaging.output_side);
    for (const std::size_t i : idxs) {
      const auto& e = manifest.examples[i];
      const auto& rel = image_path_for(e, mode);
      if (rel.empty()) {
        throw std::runtime_error("example " + e.id +
                                 " has no image; run preprocess --mode " +
                                 std::string(to_string(mode)));
      }
      const ImageRGB img = read_ppm(out / rel);
      if (img.width != cfg.imaging.output_side ||
          img.height != cfg.imaging.output_side) {
        throw std::runtime_error("image has wrong dimensions: " + rel);
      }
      ds->add(image_to_chw_bytes(img), class_index(e.cls));
      loaded.labels.push_back(class_index(e.cls));
    }
    loaded.data = std::move(ds);
  }
  return loaded;
}

void require_preprocessed(const RunConfig& cfg, const DatasetManifest& manifest,
                          Mode mode) {
  const auto it =
      manifest.preprocess_fingerprints.find(std::string(to_string(mode)));
  if (it == manifest.preprocess_fingerprints.end()) {
    throw std::runtime_error("mode " + std::string(to_string(mode)) +
                             " has not been preprocessed; run preprocess");
  }
  if (it->second != fingerprint_preprocess(cfg, mode)) {
    throw std::runtime_error(
        "preprocess fingerprint mismatch for mode " +
        std::string(to_string(mode)) +
        ": configuration changed; rerun preprocess");
  }
}

}  // namespace

void cmd_train(const RunConfig& cfg, Mode mode, std::ostream* progress) {
  cfg.validate();
  const fs::path out(cfg.out_dir);
  DirLock lock(out);
  const DatasetManifest manifest = load_manifest(out / kManifestFile);
  require_preprocessed(cfg, manifest, mode);

  LoadedData train_data = load_split(cfg, manifest, mode, "train", nullptr);

  nn::ModelSpec spec;
  if (mode == Mode::Features) {
    spec = nn::build_mlp(train_data.scaler->kept_count(), cfg.mlp_hidden,
                         kNumClasses);
  } else {
    spec = nn::build_vgg19_gap(cfg.width_factor, cfg.input_side, kNumClasses);
  }
  const std::string mode_name(to_string(mode));
  nn::Model model(spec, substream_seed(cfg.seed, "init/" + mode_name));

  nn::TrainConfig train_cfg = cfg.train;
  train_cfg.seed = substream_seed(cfg.seed, "shuffle/" + mode_name);

  const auto on_epoch = [&](const nn::EpochStats& s) {
    if (progress) {
      *progress << "epoch " << s.epoch << "/" << train_cfg.epochs << "  lr "
                << s.lr << "  loss " << s.mean_loss << "  acc " << s.accuracy
                << "\n";
    }
  };
  const nn::TrainTrace trace = nn::train(model, *train_data.data, train_cfg,
                                         on_epoch);

  nn::CheckpointMeta meta;
  meta.train_cfg = train_cfg;
  meta.seed = cfg.seed;
  meta.trace = trace;
  meta.scaler = train_data.scaler;
  meta.label = model_label(mode);
  nn::save_checkpoint(out / checkpoint_dir_name(mode), model, meta);
}

Report cmd_eval(const RunConfig& cfg, Mode mode) {
  cfg.validate();
  const fs::path out(cfg.out_dir);
  DirLock lock(out);
  const DatasetManifest manifest = load_manifest(out / kManifestFile);
  require_preprocessed(cfg, manifest, mode);

  auto loaded = nn::load_checkpoint(out / checkpoint_dir_name(mode));
  const FeatureScaler* scaler =
      loaded.meta.scaler ? &*loaded.meta.scaler : nullptr;
  if (mode == Mode::Features && !scaler) {
    throw std::runtime_error("features checkpoint is missing its scaler");
  }
  LoadedData test_data = load_split(cfg, manifest, mode, "test", scaler);

  const std::vector<int> preds =
      nn::predict(loaded.model, *test_data.data);
  const ConfusionMatrix cm = confusion(preds, test_data.labels);
  const Report report = build_report(cm, loaded.meta.label);

  save_report(report, out / (report_basename(mode) + ".json"));
  write_text(out / (report_basename(mode) + ".txt"),
             format_report_table(std::span<const Report>(&report, 1)));
  return report;
}

Report cmd_baseline(const RunConfig& cfg, std::ostream* progress) {
  cmd_preprocess(cfg, Mode::Features);
  cmd_train(cfg, Mode::Features, progress);
  return cmd_eval(cfg, Mode::Features);
}

std::string cmd_report(const std::vector<fs::path>& report_files) {
  if (report_files.empty()) {
    throw std::invalid_argument("cmd_report: need at least one report");
  }
  std::vector<Report> reports;
  reports.reserve(report_files.size());
  for (const auto& p : report_files) reports.push_back(load_report(p));
  return format_report_table(reports);
}

void cmd_render(const RunConfig& cfg, Mode mode,
                const fs::path& window_f32, const fs::path& out_image) {
  cfg.validate();
  if (mode == Mode::Features) {
    throw std::invalid_argument("render: mode must be stft or mfcc");
  }
  const auto samples = read_f32(window_f32);
  const ImageRGB img = window_to_image(samples, cfg, mode,
                                       resolve_colormap(cfg));
  write_ppm(img, out_image);
}

void save_report(const Report& report, const fs::path& json_path) {
  json per_class;
  for (const FaultClass c : kAllClasses) {
    const auto& m = report.per_class[class_index(c)];
    per_class[std::string(to_string(c))] = {{"precision", m.precision},
                                            {"recall", m.recall},
                                            {"f1", m.f1}};
  }
  json cm = json::array();
  for (int t = 0; t < kNumClasses; ++t) {
    cm.push_back(report.cm.counts[t]);
  }
  const json j = {{"model_label", report.model_label},
                  {"confusion", cm},
                  {"per_class", per_class},
                  {"overall_accuracy", report.overall_accuracy},
                  {"macro_precision", report.macro_precision},
                  {"macro_recall", report.macro_recall},
                  {"macro_f1", report.macro_f1}};
  write_text(json_path, j.dump(2) + "\n");
}

Report load_report(const fs::path& json_path) {
  const json j = json::parse(read_text(json_path));
  Report r;
  r.model_label = j.at("model_label").get<std::string>();
  const auto& cm = j.at("confusion");
  for (int t = 0; t < kNumClasses; ++t) {
    for (int p = 0; p < kNumClasses; ++p) {
      r.cm.counts[t][p] = cm.at(t).at(p).get<std::int64_t>();
    }
  }
  for (const FaultClass c : kAllClasses) {
    const auto& m = j.at("per_class").at(std::string(to_string(c)));
    r.per_class[class_index(c)] = {m.at("precision").get<double>(),
                                   m.at("recall").get<double>(),
                                   m.at("f1").get<double>()};
  }
  r.overall_accuracy = j.at("overall_accuracy").get<double>();
  r.macro_precision = j.at("macro_precision").get<double>();
  r.macro_recall = j.at("macro_recall").get<double>();
  r.macro_f1 = j.at("macro_f1").get<double>();
  return r;
}

void write_features_csv(const fs::path& path,
                        const std::vector<FeatureVector>& rows) {
  std::string text;
  for (int f = 0; f < kFeatureCount; ++f) {
    if (f) text += ',';
    text += kFeatureNames[f];
  }
  text += '\n';
  char buf[64];
  for (const auto& row : rows) {
    for (int f = 0; f < kFeatureCount; ++f) {
      std::snprintf(buf, sizeof(buf), "%.17g", row.values[f]);
      if (f) text += ',';
      text += buf;
    }
    text += '\n';
  }
  write_text(path, text);
}

std::vector<FeatureVector> read_features_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty feature table: " + path.string());
  }
  std::string expected_header;
  for (int f = 0; f < kFeatureCount; ++f) {
    if (f) expected_header += ',';
    expected_header += kFeatureNames[f];
  }
  if (line != expected_header) {
    throw std::runtime_error("unexpected feature table header in " +
                             path.string());
  }
  std::vector<FeatureVector> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    FeatureVector v;
    std::size_t pos = 0;
    for (int f = 0; f < kFeatureCount; ++f) {
      const std::size_t comma = line.find(',', pos);
      const std::string tok = line.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      v.values[f] = std::stod(tok);
      if (comma == std::string::npos && f != kFeatureCount - 1) {
        throw std::runtime_error("short feature row in " + path.string());
      }
      pos = comma + 1;
    }
    rows.push_back(v);
  }
  return rows;
}

}  // namespace rotorvib::pipeline
