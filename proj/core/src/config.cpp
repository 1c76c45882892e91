#include "rotorvib/pipeline/config.hpp"

#include <json.hpp>

#include "rotorvib/io.hpp"
#include "rotorvib/rng.hpp"

namespace rotorvib::pipeline {

using nlohmann::json;

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Stft: return "stft";
    case Mode::Mfcc: return "mfcc";
    case Mode::Features: return "features";
  }
  throw std::invalid_argument("unknown mode");
}

Mode mode_from_string(std::string_view name) {
  for (const Mode m : {Mode::Stft, Mode::Mfcc, Mode::Features}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown mode: " + std::string(name) +
                    " (expected stft, mfcc or features)");
}

void RunConfig::validate() const {
  try {
    rotor.validate();
    stft.validate();
    mel.validate(rotor.sample_rate);
    train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(duration_s > 0.0)) throw ConfigError("duration_s must be positive");
  if (!(segmentation.unit_seconds > 0.0)) {
    throw ConfigError("unit_seconds must be positive");
  }
  if (segmentation.window_samples < 2) {
    throw ConfigError("window_samples must be >= 2");
  }
  const auto unit_len = static_cast<int>(segmentation.unit_seconds *
                                         rotor.sample_rate);
  const int hop = segmentation.window_samples / 2;
  if (unit_len < (kWindowsPerUnit - 1) * hop + segmentation.window_samples) {
    throw ConfigError("unit too short for 14 half-overlapped windows");
  }
  if (segmentation.window_samples < stft.window_length) {
    throw ConfigError("window_samples shorter than the STFT window");
  }
  if (!(imaging.range_db > 0.0)) throw ConfigError("range_db must be positive");
  if (imaging.canvas_width < 1 || imaging.canvas_height < 1 ||
      imaging.output_side < 1) {
    throw ConfigError("imaging dimensions must be positive");
  }
  if (input_side != imaging.output_side) {
    throw ConfigError("model input_side must match imaging output_side");
  }
  if (!(width_factor > 0.0 && width_factor <= 1.0)) {
    throw ConfigError("width_factor must be in (0, 1]");
  }
  for (const int c : {0, 1, 2, 3}) {
    if (split.train[c] < 0 || split.test[c] < 0) {
      throw ConfigError("split counts must be nonnegative");
    }
  }
  for (const int h : mlp_hidden) {
    if (h < 1) throw ConfigError("mlp hidden widths must be >= 1");
  }
}

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError("unknown key \"" + key + "\" in " + where);
  }
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("bad value for \"" + std::string(key) +
                        "\": " + e.what());
    }
  }
}

ClassSignature signature_from_json(const json& j, const std::string& where) {
  reject_unknown(j, {"amplitudes", "clip_fraction", "noise_sigma"}, where);
  ClassSignature sig;
  get_if(j, "amplitudes", sig.amplitudes);
  get_if(j, "clip_fraction", sig.clip_fraction);
  get_if(j, "noise_sigma", sig.noise_sigma);
  return sig;
}

json signature_to_json(const ClassSignature& sig) {
  return {{"amplitudes", sig.amplitudes},
          {"clip_fraction", sig.clip_fraction},
          {"noise_sigma", sig.noise_sigma}};
}

void counts_from_json(const json& j, std::array<int, kNumClasses>& out,
                      const std::string& where) {
  reject_unknown(j, {"normal", "unbalance", "misalignment", "rubbing"}, where);
  for (const FaultClass c : kAllClasses) {
    const auto name = std::string(to_string(c));
    if (j.contains(name)) out[class_index(c)] = j.at(name).get<int>();
  }
}

json counts_to_json(const std::array<int, kNumClasses>& counts) {
  json j;
  for (const FaultClass c : kAllClasses) {
    j[std::string(to_string(c))] = counts[class_index(c)];
  }
  return j;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  RunConfig cfg;
  cfg.rotor = default_rotor_config(0);
  cfg.split = default_split_counts();

  reject_unknown(j,
                 {"seed", "deterministic", "out_dir", "rotor", "segmentation",
                  "split", "stft", "mel", "imaging", "mode", "model", "train",
                  "mlp"},
                 "config root");
  get_if(j, "seed", cfg.seed);
  get_if(j, "deterministic", cfg.deterministic);
  get_if(j, "out_dir", cfg.out_dir);

  if (j.contains("rotor")) {
    const auto& r = j.at("rotor");
    reject_unknown(r, {"rpm", "sample_rate", "channels", "duration_s", "classes"},
                   "rotor");
    get_if(r, "rpm", cfg.rotor.rpm);
    get_if(r, "sample_rate", cfg.rotor.sample_rate);
    get_if(r, "channels", cfg.rotor.channels);
    get_if(r, "duration_s", cfg.duration_s);
    if (r.contains("classes")) {
      const auto& cls = r.at("classes");
      reject_unknown(cls, {"normal", "unbalance", "misalignment", "rubbing"},
                     "rotor.classes");
      for (const FaultClass c : kAllClasses) {
        const auto name = std::string(to_string(c));
        if (cls.contains(name)) {
          cfg.rotor.class_params[class_index(c)] =
              signature_from_json(cls.at(name), "rotor.classes." + name);
        }
      }
    }
  }
  if (j.contains("segmentation")) {
    const auto& s = j.at("segmentation");
    reject_unknown(s, {"unit_seconds", "window_samples"}, "segmentation");
    get_if(s, "unit_seconds", cfg.segmentation.unit_seconds);
    get_if(s, "window_samples", cfg.segmentation.window_samples);
  }
  if (j.contains("split")) {
    const auto& s = j.at("split");
    reject_unknown(s, {"train", "test"}, "split");
    if (s.contains("train")) counts_from_json(s.at("train"), cfg.split.train, "split.train");
    if (s.contains("test")) counts_from_json(s.at("test"), cfg.split.test, "split.test");
  }
  if (j.contains("stft")) {
    const auto& s = j.at("stft");
    reject_unknown(s, {"window_length", "fft_size", "hop"}, "stft");
    get_if(s, "window_length", cfg.stft.window_length);
    get_if(s, "fft_size", cfg.stft.fft_size);
    get_if(s, "hop", cfg.stft.hop);
  }
  if (j.contains("mel")) {
    const auto& m = j.at("mel");
    reject_unknown(m, {"n_filters", "f_min", "f_max"}, "mel");
    get_if(m, "n_filters", cfg.mel.n_filters);
    get_if(m, "f_min", cfg.mel.f_min);
    get_if(m, "f_max", cfg.mel.f_max);
  }
  if (j.contains("imaging")) {
    const auto& im = j.at("imaging");
    reject_unknown(im,
                   {"range_db", "canvas_width", "canvas_height", "output_side",
                    "colormap_path"},
                   "imaging");
    get_if(im, "range_db", cfg.imaging.range_db);
    get_if(im, "canvas_width", cfg.imaging.canvas_width);
    get_if(im, "canvas_height", cfg.imaging.canvas_height);
    get_if(im, "output_side", cfg.imaging.output_side);
    get_if(im, "colormap_path", cfg.imaging.colormap_path);
  }
  if (j.contains("mode")) {
    cfg.mode = mode_from_string(j.at("mode").get<std::string>());
  }
  if (j.contains("model")) {
    const auto& m = j.at("model");
    reject_unknown(m, {"width_factor", "input_side"}, "model");
    get_if(m, "width_factor", cfg.width_factor);
    get_if(m, "input_side", cfg.input_side);
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    reject_unknown(t,
                   {"base_lr", "batch_size", "warmup_epochs", "weight_decay",
                    "epochs", "milestones", "milestone_factor", "momentum"},
                   "train");
    get_if(t, "base_lr", cfg.train.base_lr);
    get_if(t, "batch_size", cfg.train.batch_size);
    get_if(t, "warmup_epochs", cfg.train.warmup_epochs);
    get_if(t, "weight_decay", cfg.train.weight_decay);
    get_if(t, "epochs", cfg.train.epochs);
    get_if(t, "milestones", cfg.train.milestones);
    get_if(t, "milestone_factor", cfg.train.milestone_factor);
    get_if(t, "momentum", cfg.train.momentum);
  }
  if (j.contains("mlp")) {
    const auto& m = j.at("mlp");
    reject_unknown(m, {"hidden"}, "mlp");
    get_if(m, "hidden", cfg.mlp_hidden);
  }

  cfg.rotor.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return parse_run_config(text);
}

std::string run_config_to_json(const RunConfig& cfg) {
  json classes;
  for (const FaultClass c : kAllClasses) {
    classes[std::string(to_string(c))] =
        signature_to_json(cfg.rotor.class_params[class_index(c)]);
  }
  json j = {
      {"seed", cfg.seed},
      {"deterministic", cfg.deterministic},
      {"out_dir", cfg.out_dir},
      {"rotor",
       {{"rpm", cfg.rotor.rpm},
        {"sample_rate", cfg.rotor.sample_rate},
        {"channels", cfg.rotor.channels},
        {"duration_s", cfg.duration_s},
        {"classes", classes}}},
      {"segmentation",
       {{"unit_seconds", cfg.segmentation.unit_seconds},
        {"window_samples", cfg.segmentation.window_samples}}},
      {"split",
       {{"train", counts_to_json(cfg.split.train)},
        {"test", counts_to_json(cfg.split.test)}}},
      {"stft",
       {{"window_length", cfg.stft.window_length},
        {"fft_size", cfg.stft.fft_size},
        {"hop", cfg.stft.hop}}},
      {"mel",
       {{"n_filters", cfg.mel.n_filters},
        {"f_min", cfg.mel.f_min},
        {"f_max", cfg.mel.f_max}}},
      {"imaging",
       {{"range_db", cfg.imaging.range_db},
        {"canvas_width", cfg.imaging.canvas_width},
        {"canvas_height", cfg.imaging.canvas_height},
        {"output_side", cfg.imaging.output_side},
        {"colormap_path", cfg.imaging.colormap_path}}},
      {"mode", std::string(to_string(cfg.mode))},
      {"model",
       {{"width_factor", cfg.width_factor}, {"input_side", cfg.input_side}}},
      {"train",
       {{"base_lr", cfg.train.base_lr},
        {"batch_size", cfg.train.batch_size},
        {"warmup_epochs", cfg.train.warmup_epochs},
        {"weight_decay", cfg.train.weight_decay},
        {"epochs", cfg.train.epochs},
        {"milestones", cfg.train.milestones},
        {"milestone_factor", cfg.train.milestone_factor},
        {"momentum", cfg.train.momentum}}},
      {"mlp", {{"hidden", cfg.mlp_hidden}}},
  };
  return j.dump(2) + "\n";
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

json gen_relevant(const RunConfig& cfg) {
  json classes;
  for (const FaultClass c : kAllClasses) {
    classes[std::string(to_string(c))] =
        signature_to_json(cfg.rotor.class_params[class_index(c)]);
  }
  return {{"seed", cfg.seed},
          {"rpm", cfg.rotor.rpm},
          {"sample_rate", cfg.rotor.sample_rate},
          {"channels", cfg.rotor.channels},
          {"duration_s", cfg.duration_s},
          {"classes", classes},
          {"unit_seconds", cfg.segmentation.unit_seconds},
          {"window_samples", cfg.segmentation.window_samples},
          {"train_counts", counts_to_json(cfg.split.train)},
          {"test_counts", counts_to_json(cfg.split.test)}};
}

}  // namespace

std::string fingerprint_gen(const RunConfig& cfg) {
  return hex64(fnv1a64(gen_relevant(cfg).dump()));
}

std::string fingerprint_preprocess(const RunConfig& cfg, Mode mode) {
  json j = gen_relevant(cfg);
  j["mode"] = std::string(to_string(mode));
  if (mode == Mode::Stft || mode == Mode::Mfcc) {
    j["stft"] = {cfg.stft.window_length, cfg.stft.fft_size, cfg.stft.hop};
    j["imaging"] = {cfg.imaging.range_db, cfg.imaging.canvas_width,
                    cfg.imaging.canvas_height, cfg.imaging.output_side,
                    cfg.imaging.colormap_path};
  }
  if (mode == Mode::Mfcc) {
    j["mel"] = {cfg.mel.n_filters, cfg.mel.f_min, cfg.mel.f_max};
  }
  return hex64(fnv1a64(j.dump()));
}

}  // namespace rotorvib::pipeline
