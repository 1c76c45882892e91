// Command-line front end: gen | preprocess | train | eval | baseline |
// render | report. Exit codes: 0 success, 1 runtime failure, 2 bad
// configuration or arguments.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rotorvib/io.hpp"
#include "rotorvib/pipeline/commands.hpp"

namespace {

using rotorvib::pipeline::ConfigError;
using rotorvib::pipeline::Mode;
using rotorvib::pipeline::RunConfig;

struct GlobalOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool deterministic = false;
};

RunConfig resolve_config(const GlobalOpts& g) {
  if (g.config_path.empty()) {
    throw ConfigError("--config PATH is required for this subcommand");
  }
  RunConfig cfg = rotorvib::pipeline::load_run_config(g.config_path);
  if (g.seed) {
    cfg.seed = *g.seed;
    cfg.rotor.seed = *g.seed;
  }
  if (g.out_dir) cfg.out_dir = *g.out_dir;
  if (g.deterministic) cfg.deterministic = true;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotor vibration fault-diagnosis pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--config", g.config_path, "Run configuration (JSON)");
  std::uint64_t seed_val = 0;
  auto* seed_opt = app.add_option("--seed", seed_val, "Override the config seed");
  std::string out_val;
  auto* out_opt = app.add_option("--out", out_val, "Override the output directory");
  app.add_flag("--deterministic", g.deterministic,
               "Force single-threaded deterministic execution");

  auto* gen = app.add_subcommand("gen", "Synthesize recordings and the dataset manifest");
  auto* preprocess = app.add_subcommand(
      "preprocess", "Convert windows to images or the feature table");
  std::string pre_mode = "stft";
  preprocess->add_option("--mode", pre_mode, "stft | mfcc | features")
      ->required();
  auto* train = app.add_subcommand("train", "Train the classifier for a mode");
  std::string train_mode = "stft";
  train->add_option("--mode", train_mode, "stft | mfcc | features");
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the test split");
  std::string eval_mode = "stft";
  eval->add_option("--mode", eval_mode, "stft | mfcc | features");
  auto* baseline = app.add_subcommand(
      "baseline", "Feature/MLP path end to end (preprocess, train, eval)");
  auto* render = app.add_subcommand("render", "Render one raw window file to an image");
  std::string render_mode = "stft";
  std::string render_input;
  std::string render_output = "window.ppm";
  render->add_option("--mode", render_mode, "stft | mfcc");
  render->add_option("input", render_input, "Raw float32 window file")->required();
  render->add_option("-o,--output", render_output, "Output PPM path");
  auto* report = app.add_subcommand("report", "Combine stored reports into one table");
  std::vector<std::string> report_inputs;
  report->add_option("reports", report_inputs, "report_*.json files")->required();
  std::string report_output;
  report->add_option("-o,--output", report_output, "Also write the table here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*seed_opt) g.seed = seed_val;
    if (*out_opt) g.out_dir = out_val;

    if (gen->parsed()) {
      const RunConfig cfg = resolve_config(g);
      const auto manifest = rotorvib::pipeline::cmd_gen(cfg);
      std::cout << "wrote " << manifest.examples.size() << " examples ("
                << manifest.split_indices("train").size() << " train / "
                << manifest.split_indices("test").size() << " test) to "
                << cfg.out_dir << "\n";
    } else if (preprocess->parsed()) {
      const RunConfig cfg = resolve_config(g);
      const Mode mode = rotorvib::pipeline::mode_from_string(pre_mode);
      rotorvib::pipeline::cmd_preprocess(cfg, mode);
      std::cout << "preprocessed mode " << pre_mode << " into " << cfg.out_dir
                << "\n";
    } else if (train->parsed()) {
      const RunConfig cfg = resolve_config(g);
      const Mode mode = rotorvib::pipeline::mode_from_string(train_mode);
      rotorvib::pipeline::cmd_train(cfg, mode, &std::cout);
      std::cout << "checkpoint written to " << cfg.out_dir << "/"
                << rotorvib::pipeline::checkpoint_dir_name(mode) << "\n";
    } else if (eval->parsed()) {
      const RunConfig cfg = resolve_config(g);
      const Mode mode = rotorvib::pipeline::mode_from_string(eval_mode);
      const auto rep = rotorvib::pipeline::cmd_eval(cfg, mode);
      std::cout << rotorvib::format_report_table(
          std::span<const rotorvib::Report>(&rep, 1));
    } else if (baseline->parsed()) {
      const RunConfig cfg = resolve_config(g);
      const auto rep = rotorvib::pipeline::cmd_baseline(cfg, &std::cout);
      std::cout << rotorvib::format_report_table(
          std::span<const rotorvib::Report>(&rep, 1));
    } else if (render->parsed()) {
      const RunConfig cfg = resolve_config(g);
      const Mode mode = rotorvib::pipeline::mode_from_string(render_mode);
      rotorvib::pipeline::cmd_render(cfg, mode, render_input, render_output);
      std::cout << "wrote " << render_output << "\n";
    } else if (report->parsed()) {
      std::vector<std::filesystem::path> paths(report_inputs.begin(),
                                               report_inputs.end());
      const std::string table = rotorvib::pipeline::cmd_report(paths);
      std::cout << table;
      if (!report_output.empty()) {
        rotorvib::write_text(report_output, table);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
