// Acceptance suite: one pass/fail line per criterion. Run with no arguments
// for the full gate, or `acceptance_tests --only N [M...]` for a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "../test_configs.hpp"
#include "rotorvib/dsp.hpp"
#include "rotorvib/features.hpp"
#include "rotorvib/imaging.hpp"
#include "rotorvib/io.hpp"
#include "rotorvib/metrics.hpp"
#include "rotorvib/nn/checkpoint.hpp"
#include "rotorvib/nn/kernels.hpp"
#include "rotorvib/nn/model.hpp"
#include "rotorvib/nn/train.hpp"
#include "rotorvib/pipeline/commands.hpp"
#include "rotorvib/rng.hpp"
#include "rotorvib/signal.hpp"

using namespace rotorvib;
namespace fs = std::filesystem;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define REQUIRE_MSG(cond, ...)                                       \
  do {                                                               \
    if (!(cond)) {                                                   \
      char _buf[512];                                                \
      std::snprintf(_buf, sizeof(_buf), __VA_ARGS__);                \
      throw Failure(std::string(#cond) + " failed: " + _buf);        \
    }                                                                \
  } while (0)

fs::path scratch_root() {
  const fs::path dir = fs::temp_directory_path() / "rotorvib_acceptance";
  return dir;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = scratch_root() / name;
  fs::remove_all(dir);
  fs::create_directories(dir.parent_path());
  return dir;
}

// ---------------------------------------------------------------------------

void criterion_1_parameter_count() {
  const auto spec = nn::build_vgg19_gap(1.0, 298, 4);
  const std::int64_t total = nn::count_parameters(spec);
  REQUIRE_MSG(total == 20037444, "total = %lld", static_cast<long long>(total));

  // Closed-form sums from the fixed VGG19 channel chain.
  const int chain[][2] = {{3, 64},    {64, 64},   {64, 128},  {128, 128},
                          {128, 256}, {256, 256}, {256, 256}, {256, 256},
                          {256, 512}, {512, 512}, {512, 512}, {512, 512},
                          {512, 512}, {512, 512}, {512, 512}, {512, 512}};
  std::int64_t conv_closed = 0, bn_closed = 0;
  for (const auto& [ci, co] : chain) {
    conv_closed += 9LL * ci * co + co;
    bn_closed += 2LL * co;
  }
  const std::int64_t linear_closed = 512LL * 4 + 4;
  REQUIRE_MSG(conv_closed == 20024384, "conv sum %lld",
              static_cast<long long>(conv_closed));
  REQUIRE_MSG(bn_closed == 11008, "bn sum %lld",
              static_cast<long long>(bn_closed));
  REQUIRE_MSG(linear_closed == 2052, "linear sum %lld",
              static_cast<long long>(linear_closed));

  std::int64_t conv_got = 0, bn_got = 0, linear_got = 0;
  for (const auto& l : spec.layers) {
    switch (l.kind) {
      case nn::LayerKind::Conv3x3: conv_got += 9LL * l.in * l.out + l.out; break;
      case nn::LayerKind::BatchNorm: bn_got += 2LL * l.out; break;
      case nn::LayerKind::Linear:
        linear_got += static_cast<std::int64_t>(l.in) * l.out + l.out;
        break;
      default: break;
    }
  }
  REQUIRE_MSG(conv_got == conv_closed, "conv term %lld vs %lld",
              static_cast<long long>(conv_got),
              static_cast<long long>(conv_closed));
  REQUIRE_MSG(bn_got == bn_closed, "bn term mismatch");
  REQUIRE_MSG(linear_got == linear_closed, "linear term mismatch");
  REQUIRE_MSG(conv_got + bn_got + linear_got == total, "terms do not add up");
}

void criterion_2_table3_crosscheck() {
  struct Row {
    const char* model;
    double p, r, printed;
  };
  const Row rows[] = {
      {"mlp normal", 0.95, 0.95, 0.95},      {"mlp rubbing", 0.90, 0.89, 0.90},
      {"mlp unbalance", 0.96, 0.95, 0.96},   {"mlp misalignment", 0.89, 0.91, 0.90},
      {"gasvm normal", 0.90, 0.94, 0.92},    {"gasvm rubbing", 0.72, 0.66, 0.69},
      {"gasvm unbalance", 0.78, 0.77, 0.78}, {"gasvm misalignment", 0.65, 0.68, 0.66},
  };
  for (const auto& row : rows) {
    const double f1 = f1_from_pr(row.p, row.r);
    const double rounded = std::round(f1 * 100.0) / 100.0;
    REQUIRE_MSG(std::abs(rounded - row.printed) <= 0.01 + 1e-12,
                "%s: f1(%.2f, %.2f) = %.4f rounds to %.2f, printed %.2f",
                row.model, row.p, row.r, f1, rounded, row.printed);
  }
}

void criterion_3_dsp_oracles() {
  Rng rng(301);
  for (std::size_t n = 8; n <= 4096; n *= 2) {
    std::vector<std::complex<double>> x(n);
    double time_energy = 0.0;
    for (auto& v : x) {
      v = {rng.uniform01() * 2 - 1, rng.uniform01() * 2 - 1};
      time_energy += std::norm(v);
    }
    const auto fast = fft(x);
    const auto slow = oracle::naive_dft(x);
    double max_err = 0.0;
    double freq_energy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      max_err = std::max(max_err, std::abs(fast[k] - slow[k]));
      freq_energy += std::norm(fast[k]);
    }
    REQUIRE_MSG(max_err < 1e-9, "N=%zu fft error %.3e", n, max_err);
    const double parseval =
        std::abs(time_energy - freq_energy / static_cast<double>(n)) /
        time_energy;
    REQUIRE_MSG(parseval < 1e-9, "N=%zu parseval %.3e", n, parseval);
  }

  std::vector<float> window(3932);
  for (auto& v : window) v = static_cast<float>(rng.uniform01() * 2 - 1);
  const auto spec = stft(window, StftConfig{}, 65536.0);
  REQUIRE_MSG(spec.frames() == 6 && spec.bins() == 513, "stft shape %dx%d",
              spec.frames(), spec.bins());

  std::vector<float> cosine(1024);
  for (std::size_t m = 0; m < cosine.size(); ++m) {
    cosine[m] =
        static_cast<float>(std::cos(2.0 * oracle::kPi * 64.0 * m / 1024.0));
  }
  const auto tone = stft(cosine, StftConfig{}, 65536.0);
  int argmax = 0;
  for (int k = 1; k < tone.bins(); ++k) {
    if (tone.magnitudes.at(0, k) > tone.magnitudes.at(0, argmax)) argmax = k;
  }
  REQUIRE_MSG(argmax == 64, "cosine peak at bin %d", argmax);
}

void criterion_4_gradient_checks() {
  using DTensor = nn::TensorT<double>;
  Rng rng(401);

  auto random_tensor = [&](std::vector<int> shape, double scale = 1.0) {
    DTensor t(std::move(shape));
    for (auto& v : t.data) v = scale * (2.0 * rng.uniform01() - 1.0);
    return t;
  };
  auto kink_safe = [&](std::vector<int> shape) {
    DTensor t(std::move(shape));
    std::vector<double> grid(t.data.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      grid[i] = 0.01 * static_cast<double>(i + 1) + 0.002 * rng.uniform01();
    }
    rng.shuffle(grid);
    for (std::size_t i = 0; i < t.data.size(); ++i) {
      t.data[i] = (rng.uniform01() < 0.5 ? -1.0 : 1.0) * grid[i];
    }
    return t;
  };
  auto dot = [](const DTensor& a, const DTensor& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
      acc += a.data[i] * b.data[i];
    }
    return acc;
  };
  auto check_grads = [&](DTensor& x, const DTensor& analytic, auto&& eval,
                         const char* what) {
    for (std::size_t i = 0; i < x.data.size(); ++i) {
      const double fd = oracle::central_diff(&x.data[i], eval);
      const double err = oracle::rel_err(analytic.data[i], fd);
      REQUIRE_MSG(err < 1e-4, "%s grad[%zu]: analytic %.6e fd %.6e err %.3e",
                  what, i, analytic.data[i], fd, err);
    }
  };

  for (int trial = 0; trial < 20; ++trial) {
    {  // conv3x3
      DTensor x = random_tensor({1 + static_cast<int>(rng.below(2)),
                                 1 + static_cast<int>(rng.below(3)),
                                 2 + static_cast<int>(rng.below(4)),
                                 2 + static_cast<int>(rng.below(4))});
      DTensor w = random_tensor(
          {1 + static_cast<int>(rng.below(3)), x.dim(1), 3, 3});
      DTensor b = random_tensor({w.dim(0)});
      DTensor y;
      nn::conv3x3_forward(x, w, b, y);
      DTensor r = random_tensor(y.shape);
      auto eval = [&] {
        DTensor out;
        nn::conv3x3_forward(x, w, b, out);
        return dot(out, r);
      };
      DTensor gx, gw, gb;
      nn::conv3x3_backward(x, w, r, &gx, &gw, &gb);
      check_grads(x, gx, eval, "conv/x");
      check_grads(w, gw, eval, "conv/w");
      check_grads(b, gb, eval, "conv/b");
    }
    {  // batchnorm (training mode)
      const int c = 1 + static_cast<int>(rng.below(3));
      DTensor x = random_tensor({2 + static_cast<int>(rng.below(3)), c,
                                 1 + static_cast<int>(rng.below(3)),
                                 1 + static_cast<int>(rng.below(3))});
      DTensor gamma = random_tensor({c});
      DTensor beta = random_tensor({c});
      DTensor r = random_tensor(x.shape);
      auto eval = [&] {
        DTensor rm({c}), rv({c}), out;
        rv.fill(1.0);
        nn::batchnorm_forward(x, gamma, beta, rm, rv, true, 0.1, out, nullptr);
        return dot(out, r);
      };
      DTensor rm({c}), rv({c}), y;
      rv.fill(1.0);
      nn::BatchNormCache<double> cache;
      nn::batchnorm_forward(x, gamma, beta, rm, rv, true, 0.1, y, &cache);
      DTensor gx, gg, gb;
      nn::batchnorm_backward(r, gamma, cache, &gx, &gg, &gb);
      check_grads(x, gx, eval, "bn/x");
      check_grads(gamma, gg, eval, "bn/gamma");
      check_grads(beta, gb, eval, "bn/beta");
    }
    {  // relu
      DTensor x = kink_safe({1 + static_cast<int>(rng.below(3)),
                             1 + static_cast<int>(rng.below(5)), 2, 3});
      DTensor r = random_tensor(x.shape);
      auto eval = [&] {
        DTensor out;
        nn::relu_forward(x, out);
        return dot(out, r);
      };
      DTensor gx;
      nn::relu_backward(x, r, gx);
      check_grads(x, gx, eval, "relu/x");
    }
    {  // maxpool
      DTensor x = kink_safe({1 + static_cast<int>(rng.below(2)),
                             1 + static_cast<int>(rng.below(3)),
                             2 + 2 * static_cast<int>(rng.below(3)),
                             2 + 2 * static_cast<int>(rng.below(3))});
      DTensor y;
      std::vector<std::int64_t> argmax;
      nn::maxpool2x2_forward(x, y, &argmax);
      DTensor r = random_tensor(y.shape);
      auto eval = [&] {
        DTensor out;
        nn::maxpool2x2_forward(x, out, nullptr);
        return dot(out, r);
      };
      DTensor gx;
      nn::maxpool2x2_backward(r, argmax, x.shape, gx);
      check_grads(x, gx, eval, "maxpool/x");
    }
    {  // gap
      DTensor x = random_tensor({1 + static_cast<int>(rng.below(3)),
                                 1 + static_cast<int>(rng.below(4)),
                                 1 + static_cast<int>(rng.below(4)),
                                 1 + static_cast<int>(rng.below(4))});
      DTensor y;
      nn::gap_forward(x, y);
      DTensor r = random_tensor(y.shape);
      auto eval = [&] {
        DTensor out;
        nn::gap_forward(x, out);
        return dot(out, r);
      };
      DTensor gx;
      nn::gap_backward(r, x.shape, gx);
      check_grads(x, gx, eval, "gap/x");
    }
    {  // linear
      DTensor x = random_tensor({1 + static_cast<int>(rng.below(4)),
                                 1 + static_cast<int>(rng.below(6))});
      DTensor w = random_tensor({1 + static_cast<int>(rng.below(6)), x.dim(1)});
      DTensor b = random_tensor({w.dim(0)});
      DTensor y;
      nn::linear_forward(x, w, b, y);
      DTensor r = random_tensor(y.shape);
      auto eval = [&] {
        DTensor out;
        nn::linear_forward(x, w, b, out);
        return dot(out, r);
      };
      DTensor gx, gw, gb;
      nn::linear_backward(x, w, r, &gx, &gw, &gb);
      check_grads(x, gx, eval, "linear/x");
      check_grads(w, gw, eval, "linear/w");
      check_grads(b, gb, eval, "linear/b");
    }
    {  // softmax cross entropy
      const int n = 1 + static_cast<int>(rng.below(4));
      const int k = 2 + static_cast<int>(rng.below(5));
      DTensor logits = random_tensor({n, k}, 2.0);
      std::vector<int> labels(n);
      for (auto& l : labels) l = static_cast<int>(rng.below(k));
      DTensor grad;
      nn::softmax_cross_entropy(logits, labels, &grad);
      auto eval = [&] {
        return static_cast<double>(
            nn::softmax_cross_entropy(logits, labels, nullptr));
      };
      check_grads(logits, grad, eval, "softmax/logits");
    }
  }
}

void criterion_5_segmentation() {
  const RotorConfig cfg = default_rotor_config(7);
  const auto ts = synthesize_recording(FaultClass::Normal, cfg, 30.0, 0);
  const auto units = segment_units(ts, 0.48);
  REQUIRE_MSG(units.size() == 62, "units per channel = %zu", units.size());

  const auto windows = segment_samples(units[0], 3932);
  REQUIRE_MSG(windows.size() == 14, "windows per unit = %zu", windows.size());
  for (int i = 0; i + 1 < 14; ++i) {
    for (int k = 0; k < 3932 - 1966; ++k) {
      REQUIRE_MSG(windows[i].samples[1966 + k] == windows[i + 1].samples[k],
                  "window overlap broken at pair %d offset %d", i, k);
    }
  }

  // Catalog with the real pipeline's unit layout: 4 channels x 62 units.
  std::vector<SampleWindow> catalog;
  for (const FaultClass cls : kAllClasses) {
    for (int ch = 0; ch < 4; ++ch) {
      for (int u = 0; u < 62; ++u) {
        for (int w = 0; w < kWindowsPerUnit; ++w) {
          SampleWindow sw;
          sw.label = cls;
          sw.channel_id = ch;
          sw.unit_index = u;
          sw.window_index = w;
          catalog.push_back(sw);
        }
      }
    }
  }
  const auto split = split_dataset(catalog, default_split_counts(), 7);
  REQUIRE_MSG(split.train.size() == 844, "train %zu", split.train.size());
  REQUIRE_MSG(split.test.size() == 212, "test %zu", split.test.size());
  const std::array<int, 4> want_train = {229, 205, 211, 199};
  const std::array<int, 4> want_test = {43, 55, 53, 61};
  REQUIRE_MSG(split.train_per_class == want_train, "train per-class counts");
  REQUIRE_MSG(split.test_per_class == want_test, "test per-class counts");
}

double run_desk_mode(const fs::path& dir, pipeline::Mode mode,
                     double* train_minutes) {
  using pipeline::RunConfig;
  const RunConfig cfg =
      pipeline::parse_run_config(testcfg::desk(dir.string()));
  if (!fs::exists(dir / pipeline::kManifestFile)) pipeline::cmd_gen(cfg);
  pipeline::cmd_preprocess(cfg, mode);

  const auto t0 = std::chrono::steady_clock::now();
  pipeline::cmd_train(cfg, mode);
  const auto t1 = std::chrono::steady_clock::now();
  if (train_minutes) {
    *train_minutes = std::chrono::duration<double>(t1 - t0).count() / 60.0;
  }
  const Report report = pipeline::cmd_eval(cfg, mode);
  return report.macro_f1;
}

void criterion_6_desk_learning() {
  const fs::path dir = fresh_dir("desk");
  for (const auto mode : {pipeline::Mode::Stft, pipeline::Mode::Mfcc}) {
    double minutes = 0.0;
    const double f1 = run_desk_mode(dir, mode, &minutes);
    std::printf("        desk %s: macro-F1 %.4f, train %.1f min\n",
                std::string(to_string(mode)).c_str(), f1, minutes);
    std::fflush(stdout);
    REQUIRE_MSG(f1 >= 0.95, "%s macro-F1 %.4f < 0.95",
                std::string(to_string(mode)).c_str(), f1);
    REQUIRE_MSG(minutes <= 15.0, "%s training took %.1f min",
                std::string(to_string(mode)).c_str(), minutes);
  }
}

void criterion_7_overfit() {
  // Eight windows, two per class, rendered with the desk imaging settings.
  const fs::path dir = fresh_dir("overfit");
  pipeline::RunConfig cfg =
      pipeline::parse_run_config(testcfg::desk(dir.string()));
  cfg.rotor.channels = 1;
  cfg.duration_s = 0.97;  // two units per channel
  cfg.split.train = {2, 2, 2, 2};
  cfg.split.test = {0, 0, 0, 0};
  pipeline::cmd_gen(cfg);
  pipeline::cmd_preprocess(cfg, pipeline::Mode::Stft);

  const auto manifest =
      pipeline::load_manifest(fs::path(cfg.out_dir) / pipeline::kManifestFile);
  const auto idxs = manifest.split_indices("train");
  REQUIRE_MSG(idxs.size() == 8, "expected 8 train windows, got %zu",
              idxs.size());

  nn::Tensor batch_a({4, 3, 64, 64}), batch_b({4, 3, 64, 64});
  std::vector<int> labels_a(4), labels_b(4);
  const std::size_t stride = 3 * 64 * 64;
  for (std::size_t i = 0; i < 8; ++i) {
    const auto& e = manifest.examples[idxs[i]];
    const ImageRGB img = read_ppm(fs::path(cfg.out_dir) / e.image_stft);
    const InputTensor t = to_input_tensor(img);
    auto& batch = i < 4 ? batch_a : batch_b;
    auto& labels = i < 4 ? labels_a : labels_b;
    std::copy(t.values.begin(), t.values.end(),
              batch.data.begin() + (i % 4) * stride);
    labels[i % 4] = class_index(e.cls);
  }

  nn::TrainConfig tc;
  tc.base_lr = 0.02;
  tc.weight_decay = 0.0005;
  tc.momentum = 0.9;
  tc.milestones = {};
  nn::Model model(nn::build_vgg19_gap(0.125, 64, 4), 7);
  nn::Trainer trainer(model, tc);
  int steps = 0;
  double loss = 1e9;
  while (steps < 500) {
    const double la = trainer.step(batch_a, labels_a, 0.02);
    ++steps;
    const double lb = trainer.step(batch_b, labels_b, 0.02);
    ++steps;
    loss = 0.5 * (la + lb);
    if (loss <= 0.01) break;
  }
  std::printf("        overfit: loss %.5f after %d steps\n", loss, steps);
  std::fflush(stdout);
  REQUIRE_MSG(loss <= 0.01, "loss %.4f after %d steps", loss, steps);
  REQUIRE_MSG(steps <= 500, "needed %d steps", steps);
}

void compare_trees(const fs::path& a, const fs::path& b) {
  std::set<fs::path> rel_a, rel_b;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (entry.is_regular_file()) rel_a.insert(fs::relative(entry.path(), a));
  }
  for (const auto& entry : fs::recursive_directory_iterator(b)) {
    if (entry.is_regular_file()) rel_b.insert(fs::relative(entry.path(), b));
  }
  REQUIRE_MSG(rel_a == rel_b, "output trees list different files");
  for (const auto& rel : rel_a) {
    const auto bytes_a = read_bytes(a / rel);
    const auto bytes_b = read_bytes(b / rel);
    REQUIRE_MSG(bytes_a == bytes_b, "file differs between runs: %s",
                rel.string().c_str());
  }
}

void criterion_8_determinism() {
  const fs::path dir_a = fresh_dir("det_a");
  const fs::path dir_b = fresh_dir("det_b");
  for (const auto& dir : {dir_a, dir_b}) {
    const auto cfg = pipeline::parse_run_config(testcfg::mini(dir.string()));
    pipeline::cmd_gen(cfg);
    pipeline::cmd_preprocess(cfg, pipeline::Mode::Stft);
    pipeline::cmd_train(cfg, pipeline::Mode::Stft);
    pipeline::cmd_eval(cfg, pipeline::Mode::Stft);
  }
  compare_trees(dir_a, dir_b);
}

void criterion_9_imaging() {
  // Gain invariance of the dB normalization.
  Rng rng(901);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix s(5 + static_cast<int>(rng.below(8)),
             5 + static_cast<int>(rng.below(8)));
    for (auto& v : s.data) v = 1e-6 + rng.uniform01();
    const Matrix base = to_db_normalized(s, 80.0);
    for (const double c : {0.5, 2.0, 1000.0}) {
      Matrix scaled = s;
      for (auto& v : scaled.data) v *= c;
      const Matrix d = to_db_normalized(scaled, 80.0);
      for (std::size_t i = 0; i < d.data.size(); ++i) {
        REQUIRE_MSG(std::abs(d.data[i] - base.data[i]) < 1e-9,
                    "gain invariance broke at c=%.1f", c);
      }
    }
  }

  // Colormap luminance strictly increasing.
  const auto& cmap = default_colormap();
  double prev = -1.0;
  for (int i = 0; i < 256; ++i) {
    const double lum =
        luminance(cmap.table[i][0], cmap.table[i][1], cmap.table[i][2]);
    REQUIRE_MSG(lum > prev, "luminance not strictly increasing at entry %d", i);
    prev = lum;
  }

  // Every image emitted under the paper-default imaging settings is a valid
  // 298x298 P6 file.
  const fs::path dir = fresh_dir("img298");
  pipeline::RunConfig cfg = pipeline::parse_run_config("{}");
  cfg.out_dir = dir.string();
  cfg.rotor.channels = 1;
  cfg.duration_s = 1.0;  // two units
  cfg.split.train = {2, 2, 2, 2};
  cfg.split.test = {1, 1, 1, 1};
  pipeline::cmd_gen(cfg);
  pipeline::cmd_preprocess(cfg, pipeline::Mode::Stft);
  pipeline::cmd_preprocess(cfg, pipeline::Mode::Mfcc);
  const auto manifest = pipeline::load_manifest(dir / pipeline::kManifestFile);
  int checked = 0;
  for (const auto& e : manifest.examples) {
    for (const auto& rel : {e.image_stft, e.image_mfcc}) {
      REQUIRE_MSG(!rel.empty(), "missing image for %s", e.id.c_str());
      const auto bytes = read_bytes(dir / rel);
      REQUIRE_MSG(bytes.size() > 15 && bytes[0] == 'P' && bytes[1] == '6',
                  "not a P6 file: %s", rel.c_str());
      const ImageRGB img = decode_ppm(bytes);
      REQUIRE_MSG(img.width == 298 && img.height == 298, "%s is %dx%d",
                  rel.c_str(), img.width, img.height);
      ++checked;
    }
  }
  REQUIRE_MSG(checked == 24, "checked %d images", checked);
}

void criterion_10_baseline() {
  // Scale equivariance of the 30-feature extractor.
  Rng rng(1001);
  std::vector<float> w(512);
  for (auto& x : w) x = static_cast<float>(rng.uniform01() * 2 - 1);
  const double c = 3.0;
  std::vector<float> scaled(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    scaled[i] = static_cast<float>(c * w[i]);
  }
  const auto base = extract_features(w, 4096.0, 40.0);
  const auto big = extract_features(scaled, 4096.0, 40.0);
  const std::map<std::string, int> exponent = {
      {"mean", 1},          {"abs_mean", 1},       {"rms", 1},
      {"std", 1},           {"variance", 2},       {"skewness", 0},
      {"kurtosis", 0},      {"maximum", 1},        {"minimum", 1},
      {"peak_to_peak", 1},  {"crest_factor", 0},   {"shape_factor", 0},
      {"impulse_factor", 0}, {"clearance_factor", 0}, {"energy", 2},
      {"spectral_mean", 1}, {"spectral_std", 1},   {"spectral_skewness", 0},
      {"spectral_kurtosis", 0}, {"spectral_centroid", 0}, {"spectral_rms", 1},
      {"spectral_peak_magnitude", 1}, {"peak_frequency_hz", 0},
      {"band_power_1x", 2}, {"band_power_2x", 2},  {"band_power_3x", 2},
      {"band_power_4x", 2}, {"band_power_5x", 2},  {"spectral_entropy", 0},
      {"band_ratio_2x_1x", 0}};
  REQUIRE_MSG(exponent.size() == kFeatureCount, "feature list drifted");
  for (int f = 0; f < kFeatureCount; ++f) {
    const auto it = exponent.find(std::string(kFeatureNames[f]));
    REQUIRE_MSG(it != exponent.end(), "unknown feature %s",
                std::string(kFeatureNames[f]).c_str());
    const double expected = std::pow(c, it->second) * base.values[f];
    REQUIRE_MSG(oracle::rel_err(big.values[f], expected) < 1e-5,
                "%s: expected %.6e got %.6e",
                std::string(kFeatureNames[f]).c_str(), expected,
                big.values[f]);
  }

  // Baseline pipeline end to end, then a combined Table-3-style report.
  const fs::path dir = fresh_dir("baseline");
  const auto cfg = pipeline::parse_run_config(testcfg::mini(dir.string()));
  pipeline::cmd_gen(cfg);
  const Report mlp = pipeline::cmd_baseline(cfg);
  REQUIRE_MSG(mlp.model_label == "mlp-baseline", "label %s",
              mlp.model_label.c_str());
  const auto rows = pipeline::read_features_csv(dir / "features.csv");
  REQUIRE_MSG(rows.size() == 104, "feature rows %zu", rows.size());

  pipeline::cmd_preprocess(cfg, pipeline::Mode::Stft);
  pipeline::cmd_train(cfg, pipeline::Mode::Stft);
  pipeline::cmd_eval(cfg, pipeline::Mode::Stft);
  const std::string table = pipeline::cmd_report(
      {dir / "report_stft.json", dir / "report_features.json"});
  write_text(dir / "comparison.txt", table);
  REQUIRE_MSG(std::count(table.begin(), table.end(), '\n') == 11,
              "expected 8 class rows + 2 macro rows + header");
  REQUIRE_MSG(table.find("mlp-baseline") != std::string::npos,
              "missing baseline rows");
}

struct Criterion {
  int id;
  const char* name;
  std::function<void()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only") continue;
    only.push_back(std::atoi(argv[i]));
  }

  const std::vector<Criterion> criteria = {
      {1, "parameter-count fidelity (20,037,444 and its decomposition)",
       criterion_1_parameter_count},
      {2, "table-3 F1 cross-check from printed precision/recall",
       criterion_2_table3_crosscheck},
      {3, "dsp oracles (fft vs direct DFT, Parseval, stft geometry)",
       criterion_3_dsp_oracles},
      {4, "finite-difference gradient checks for every layer type",
       criterion_4_gradient_checks},
      {5, "segmentation fidelity (62 units, 14 windows, 844/212 split)",
       criterion_5_segmentation},
      {6, "desk-profile learning reaches macro-F1 >= 0.95 (stft and mfcc)",
       criterion_6_desk_learning},
      {7, "overfit sanity (8 samples to loss <= 0.01 within 500 steps)",
       criterion_7_overfit},
      {8, "end-to-end byte determinism across two identical runs",
       criterion_8_determinism},
      {9, "imaging invariances and valid 298x298 P6 output",
       criterion_9_imaging},
      {10, "feature/MLP baseline path with comparison report",
       criterion_10_baseline},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    if (!only.empty() &&
        std::find(only.begin(), only.end(), criterion.id) == only.end()) {
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    std::string error;
    try {
      criterion.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (error.empty()) {
      std::printf("[PASS] criterion %2d: %s (%.1fs)\n", criterion.id,
                  criterion.name, secs);
    } else {
      std::printf("[FAIL] criterion %2d: %s (%.1fs)\n       %s\n",
                  criterion.id, criterion.name, secs, error.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
