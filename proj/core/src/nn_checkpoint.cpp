#include "rotorvib/nn/checkpoint.hpp"

#include <cstring>

#include <json.hpp>

#include "rotorvib/io.hpp"

namespace rotorvib::nn {

using nlohmann::json;

namespace {

json spec_to_json(const ModelSpec& spec) {
  json layers = json::array();
  for (const auto& l : spec.layers) {
    layers.push_back({{"kind", std::string(to_string(l.kind))},
                      {"in", l.in},
                      {"out", l.out}});
  }
  return {{"layers", layers},
          {"width_factor", spec.width_factor},
          {"input_side", spec.input_side},
          {"input_channels", spec.input_channels},
          {"n_classes", spec.n_classes}};
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec spec;
  for (const auto& l : j.at("layers")) {
    spec.layers.push_back({layer_kind_from_string(
                               l.at("kind").get<std::string>()),
                           l.at("in").get<int>(), l.at("out").get<int>()});
  }
  spec.width_factor = j.at("width_factor").get<double>();
  spec.input_side = j.at("input_side").get<int>();
  spec.input_channels = j.at("input_channels").get<int>();
  spec.n_classes = j.at("n_classes").get<int>();
  return spec;
}

json train_cfg_to_json(const TrainConfig& cfg) {
  return {{"base_lr", cfg.base_lr},
          {"batch_size", cfg.batch_size},
          {"warmup_epochs", cfg.warmup_epochs},
          {"weight_decay", cfg.weight_decay},
          {"epochs", cfg.epochs},
          {"milestones", cfg.milestones},
          {"milestone_factor", cfg.milestone_factor},
          {"momentum", cfg.momentum},
          {"seed", cfg.seed}};
}

TrainConfig train_cfg_from_json(const json& j) {
  TrainConfig cfg;
  cfg.base_lr = j.at("base_lr").get<double>();
  cfg.batch_size = j.at("batch_size").get<int>();
  cfg.warmup_epochs = j.at("warmup_epochs").get<int>();
  cfg.weight_decay = j.at("weight_decay").get<double>();
  cfg.epochs = j.at("epochs").get<int>();
  cfg.milestones = j.at("milestones").get<std::vector<int>>();
  cfg.milestone_factor = j.at("milestone_factor").get<double>();
  cfg.momentum = j.at("momentum").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

json scaler_to_json(const FeatureScaler& s) {
  return {{"mean", std::vector<double>(s.mean.begin(), s.mean.end())},
          {"stddev", std::vector<double>(s.stddev.begin(), s.stddev.end())},
          {"kept", std::vector<bool>(s.kept.begin(), s.kept.end())}};
}

FeatureScaler scaler_from_json(const json& j) {
  FeatureScaler s;
  const auto mean = j.at("mean").get<std::vector<double>>();
  const auto stddev = j.at("stddev").get<std::vector<double>>();
  const auto kept = j.at("kept").get<std::vector<bool>>();
  if (mean.size() != kFeatureCount || stddev.size() != kFeatureCount ||
      kept.size() != kFeatureCount) {
    throw std::runtime_error("checkpoint scaler has wrong feature count");
  }
  std::copy(mean.begin(), mean.end(), s.mean.begin());
  std::copy(stddev.begin(), stddev.end(), s.stddev.begin());
  std::copy(kept.begin(), kept.end(), s.kept.begin());
  return s;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& dir, const Model& model,
                     const CheckpointMeta& meta) {
  std::filesystem::create_directories(dir);

  json j;
  j["model"] = spec_to_json(model.spec());
  j["train_config"] = train_cfg_to_json(meta.train_cfg);
  j["seed"] = meta.seed;
  j["label"] = meta.label;
  json trace = json::array();
  for (const auto& e : meta.trace.epochs) {
    trace.push_back({{"epoch", e.epoch},
                     {"lr", e.lr},
                     {"loss", e.mean_loss},
                     {"accuracy", e.accuracy},
                     {"steps", e.steps}});
  }
  j["trace"] = trace;
  json running = json::array();
  for (const auto& t : model.bn_running()) {
    running.push_back(std::vector<float>(t.data.begin(), t.data.end()));
  }
  j["bn_running"] = running;
  if (meta.scaler) {
    j["scaler"] = scaler_to_json(*meta.scaler);
  } else {
    j["scaler"] = nullptr;
  }
  write_text(dir / kCheckpointJson, j.dump(2) + "\n");

  const auto flat = model.flat_parameters();
  std::vector<std::uint8_t> bytes(flat.size() * sizeof(float));
  std::memcpy(bytes.data(), flat.data(), bytes.size());
  write_bytes(dir / kCheckpointBlob, bytes);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& dir) {
  const json j = json::parse(read_text(dir / kCheckpointJson));
  const ModelSpec spec = spec_from_json(j.at("model"));

  CheckpointMeta meta;
  meta.train_cfg = train_cfg_from_json(j.at("train_config"));
  meta.seed = j.at("seed").get<std::uint64_t>();
  meta.label = j.at("label").get<std::string>();
  for (const auto& e : j.at("trace")) {
    meta.trace.epochs.push_back({e.at("epoch").get<int>(),
                                 e.at("lr").get<double>(),
                                 e.at("loss").get<double>(),
                                 e.at("accuracy").get<double>(),
                                 e.at("steps").get<int>()});
  }
  if (!j.at("scaler").is_null()) {
    meta.scaler = scaler_from_json(j.at("scaler"));
  }

  Model model(spec, /*init_seed=*/0);

  const auto bytes = read_bytes(dir / kCheckpointBlob);
  const auto expected =
      static_cast<std::size_t>(count_parameters(spec)) * sizeof(float);
  if (bytes.size() != expected) {
    throw std::runtime_error(
        "corrupted checkpoint: blob has " + std::to_string(bytes.size()) +
        " bytes, expected " + std::to_string(expected));
  }
  std::vector<float> flat(bytes.size() / sizeof(float));
  std::memcpy(flat.data(), bytes.data(), bytes.size());
  model.load_flat_parameters(flat);

  const auto running = j.at("bn_running");
  if (running.size() != model.bn_running().size()) {
    throw std::runtime_error("checkpoint running-stat count mismatch");
  }
  for (std::size_t i = 0; i < model.bn_running().size(); ++i) {
    const auto vals = running[i].get<std::vector<float>>();
    if (vals.size() != model.bn_running()[i].data.size()) {
      throw std::runtime_error("checkpoint running-stat size mismatch");
    }
    std::copy(vals.begin(), vals.end(), model.bn_running()[i].data.begin());
  }

  return {std::move(model), std::move(meta)};
}

}  // namespace rotorvib::nn
