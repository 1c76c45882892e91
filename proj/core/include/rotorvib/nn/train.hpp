#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "rotorvib/nn/model.hpp"

namespace rotorvib::nn {

struct TrainConfig {
  double base_lr = 0.1;
  int batch_size = 4;
  int warmup_epochs = 10;
  double weight_decay = 0.04;
  int epochs = 200;
  std::vector<int> milestones = {60, 120, 160};
  double milestone_factor = 0.2;
  double momentum = 0.9;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Warm-up ramp base_lr * e / warmup for e <= warmup, then
/// base_lr * factor^(milestones passed). Epochs are 1-based.
double lr_at_epoch(int epoch, const TrainConfig& cfg);

struct SgdState {
  std::vector<Tensor> momentum;
};

/// g = grad + weight_decay * param; buf = momentum * buf + g;
/// param -= lr * buf.
void sgd_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads,
              SgdState& state, double lr, const TrainConfig& cfg);

/// Minimal dataset interface: fills a example into a float span in the
/// model's input layout.
class TensorDataset {
 public:
  virtual ~TensorDataset() = default;
  virtual int size() const = 0;
  virtual std::vector<int> example_shape() const = 0;  // e.g. {3, 64, 64}
  virtual void fill(int index, float* out) const = 0;
  virtual int label(int index) const = 0;
};

/// Images stored as packed bytes (channel-major, byte/255 on fill).
class ImageDataset final : public TensorDataset {
 public:
  ImageDataset(int side) : side_(side) {}
  void add(std::vector<std::uint8_t> chw_bytes, int label);
  int size() const override { return static_cast<int>(labels_.size()); }
  std::vector<int> example_shape() const override { return {3, side_, side_}; }
  void fill(int index, float* out) const override;
  int label(int index) const override { return labels_[index]; }

 private:
  int side_;
  std::vector<std::vector<std::uint8_t>> images_;
  std::vector<int> labels_;
};

/// Feature vectors, stored as floats.
class FeatureDataset final : public TensorDataset {
 public:
  explicit FeatureDataset(int dim) : dim_(dim) {}
  void add(const std::vector<double>& values, int label);
  int size() const override { return static_cast<int>(labels_.size()); }
  std::vector<int> example_shape() const override { return {dim_}; }
  void fill(int index, float* out) const override;
  int label(int index) const override { return labels_[index]; }

 private:
  int dim_;
  std::vector<std::vector<float>> rows_;
  std::vector<int> labels_;
};

struct EpochStats {
  int epoch = 0;
  double lr = 0.0;
  double mean_loss = 0.0;
  double accuracy = 0.0;
  int steps = 0;  // optimizer steps this epoch: ceil(dataset / batch_size)
};

struct TrainTrace {
  std::vector<EpochStats> epochs;
};

/// One optimizer step on an explicit batch; returns the batch loss.
/// Exposed so tests can drive custom loops (e.g. overfit checks).
class Trainer {
 public:
  Trainer(Model& model, const TrainConfig& cfg);
  double step(const Tensor& x, const std::vector<int>& labels, double lr);
  /// Correct predictions in the last step's forward pass.
  int last_correct() const { return last_correct_; }

 private:
  Model& model_;
  TrainConfig cfg_;
  SgdState state_;
  int last_correct_ = 0;
};

/// Full training loop: seeded shuffle per epoch, batches of cfg.batch_size
/// (final partial batch included), lr from lr_at_epoch. Throws on non-finite
/// loss. Deterministic given cfg.seed.
TrainTrace train(Model& model, const TensorDataset& data,
                 const TrainConfig& cfg,
                 const std::function<void(const EpochStats&)>& on_epoch = {});

/// Batched inference (eval mode); returns argmax class per example.
std::vector<int> predict(Model& model, const TensorDataset& data,
                         int batch_size = 64);

}  // namespace rotorvib::nn
