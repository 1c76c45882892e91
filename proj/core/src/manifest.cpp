#include "rotorvib/pipeline/manifest.hpp"

#include <json.hpp>

#include "rotorvib/io.hpp"

namespace rotorvib::pipeline {

using nlohmann::json;

std::vector<std::size_t> DatasetManifest::split_indices(
    std::string_view split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (examples[i].split == split) out.push_back(i);
  }
  return out;
}

void save_manifest(const DatasetManifest& m,
                   const std::filesystem::path& path) {
  json recordings = json::array();
  for (const auto& r : m.recordings) {
    recordings.push_back({{"class", std::string(to_string(r.cls))},
                          {"channel", r.channel},
                          {"path", r.path},
                          {"samples", r.samples}});
  }
  json examples = json::array();
  for (const auto& e : m.examples) {
    json je = {{"id", e.id},
               {"class", std::string(to_string(e.cls))},
               {"channel", e.channel},
               {"unit", e.unit},
               {"window", e.window},
               {"raw_path", e.raw_path},
               {"offset", e.offset},
               {"split", e.split}};
    if (!e.image_stft.empty()) je["image_stft"] = e.image_stft;
    if (!e.image_mfcc.empty()) je["image_mfcc"] = e.image_mfcc;
    if (e.feature_row >= 0) je["feature_row"] = e.feature_row;
    examples.push_back(je);
  }
  const json j = {{"config_fingerprint", m.config_fingerprint},
                  {"seed", m.seed},
                  {"sample_rate", m.sample_rate},
                  {"rpm", m.rpm},
                  {"window_samples", m.window_samples},
                  {"recordings", recordings},
                  {"examples", examples},
                  {"preprocess_fingerprints", m.preprocess_fingerprints}};
  write_text(path, j.dump(2) + "\n");
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw std::runtime_error("manifest parse failure: " + std::string(e.what()));
  }
  DatasetManifest m;
  m.config_fingerprint = j.at("config_fingerprint").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.sample_rate = j.at("sample_rate").get<double>();
  m.rpm = j.at("rpm").get<double>();
  m.window_samples = j.at("window_samples").get<int>();
  for (const auto& r : j.at("recordings")) {
    m.recordings.push_back(
        {fault_class_from_string(r.at("class").get<std::string>()),
         r.at("channel").get<int>(), r.at("path").get<std::string>(),
         r.at("samples").get<std::int64_t>()});
  }
  for (const auto& e : j.at("examples")) {
    ExampleRef ref;
    ref.id = e.at("id").get<std::string>();
    ref.cls = fault_class_from_string(e.at("class").get<std::string>());
    ref.channel = e.at("channel").get<int>();
    ref.unit = e.at("unit").get<int>();
    ref.window = e.at("window").get<int>();
    ref.raw_path = e.at("raw_path").get<std::string>();
    ref.offset = e.at("offset").get<std::int64_t>();
    ref.split = e.at("split").get<std::string>();
    if (e.contains("image_stft")) ref.image_stft = e.at("image_stft").get<std::string>();
    if (e.contains("image_mfcc")) ref.image_mfcc = e.at("image_mfcc").get<std::string>();
    if (e.contains("feature_row")) ref.feature_row = e.at("feature_row").get<int>();
    m.examples.push_back(std::move(ref));
  }
  if (j.contains("preprocess_fingerprints")) {
    m.preprocess_fingerprints =
        j.at("preprocess_fingerprints").get<std::map<std::string, std::string>>();
  }
  return m;
}

}  // namespace rotorvib::pipeline
