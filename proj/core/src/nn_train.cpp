#include "rotorvib/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rotorvib/rng.hpp"

namespace rotorvib::nn {

void TrainConfig::validate() const {
  if (!(base_lr > 0.0)) throw std::invalid_argument("base_lr must be positive");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (warmup_epochs < 1) throw std::invalid_argument("warmup_epochs must be >= 1");
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight_decay must be >= 0");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(milestone_factor > 0.0)) {
    throw std::invalid_argument("milestone_factor must be positive");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::invalid_argument("momentum must be in [0, 1)");
  }
  int prev = 0;
  for (const int m : milestones) {
    if (m <= prev) throw std::invalid_argument("milestones must be ascending");
    if (m >= epochs) throw std::invalid_argument("milestones must be < epochs");
    prev = m;
  }
}

double lr_at_epoch(int epoch, const TrainConfig& cfg) {
  cfg.validate();
  if (epoch < 1 || epoch > cfg.epochs) {
    throw std::out_of_range("epoch out of range");
  }
  if (epoch <= cfg.warmup_epochs) {
    return cfg.base_lr * epoch / cfg.warmup_epochs;
  }
  int passed = 0;
  for (const int m : cfg.milestones) {
    if (m <= epoch) ++passed;
  }
  return cfg.base_lr * std::pow(cfg.milestone_factor, passed);
}

void sgd_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads,
              SgdState& state, double lr, const TrainConfig& cfg) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("sgd_step: params/grads count mismatch");
  }
  if (state.momentum.empty()) {
    state.momentum.reserve(params.size());
    for (const auto& p : params) {
      Tensor buf(p.shape);
      state.momentum.push_back(std::move(buf));
    }
  }
  const auto wd = static_cast<float>(cfg.weight_decay);
  const auto mom = static_cast<float>(cfg.momentum);
  const auto flr = static_cast<float>(lr);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    const auto& g = grads[i];
    auto& buf = state.momentum[i];
    if (!p.same_shape(g) || !p.same_shape(buf)) {
      throw std::invalid_argument("sgd_step: shape mismatch");
    }
    for (std::size_t j = 0; j < p.data.size(); ++j) {
      const float adj = g.data[j] + wd * p.data[j];
      buf.data[j] = mom * buf.data[j] + adj;
      p.data[j] -= flr * buf.data[j];
    }
  }
}

void ImageDataset::add(std::vector<std::uint8_t> chw_bytes, int label) {
  const auto expected = 3 * static_cast<std::size_t>(side_) * side_;
  if (chw_bytes.size() != expected) {
    throw std::invalid_argument("ImageDataset: wrong image size");
  }
  images_.push_back(std::move(chw_bytes));
  labels_.push_back(label);
}

void ImageDataset::fill(int index, float* out) const {
  const auto& img = images_[index];
  for (std::size_t i = 0; i < img.size(); ++i) {
    out[i] = static_cast<float>(img[i]) / 255.0f;
  }
}

void FeatureDataset::add(const std::vector<double>& values, int label) {
  if (static_cast<int>(values.size()) != dim_) {
    throw std::invalid_argument("FeatureDataset: wrong feature count");
  }
  std::vector<float> row(values.begin(), values.end());
  rows_.push_back(std::move(row));
  labels_.push_back(label);
}

void FeatureDataset::fill(int index, float* out) const {
  const auto& row = rows_[index];
  std::copy(row.begin(), row.end(), out);
}

namespace {

Tensor make_batch(const TensorDataset& data, const std::vector<int>& indices,
                  std::size_t begin, std::size_t end) {
  const auto shape = data.example_shape();
  std::vector<int> batch_shape;
  batch_shape.push_back(static_cast<int>(end - begin));
  batch_shape.insert(batch_shape.end(), shape.begin(), shape.end());
  Tensor x(batch_shape);
  const std::size_t stride = static_cast<std::size_t>(
      Tensor::numel_of(shape));
  for (std::size_t i = begin; i < end; ++i) {
    data.fill(indices[i], x.data.data() + (i - begin) * stride);
  }
  return x;
}

int count_correct(const Tensor& logits, const std::vector<int>& labels) {
  const int batch = logits.dim(0);
  const int k = logits.dim(1);
  int correct = 0;
  for (int n = 0; n < batch; ++n) {
    const float* row = logits.data.data() + static_cast<std::size_t>(n) * k;
    int arg = 0;
    for (int i = 1; i < k; ++i) {
      if (row[i] > row[arg]) arg = i;
    }
    if (arg == labels[n]) ++correct;
  }
  return correct;
}

}  // namespace

Trainer::Trainer(Model& model, const TrainConfig& cfg)
    : model_(model), cfg_(cfg) {
  cfg_.validate();
}

double Trainer::step(const Tensor& x, const std::vector<int>& labels,
                     double lr) {
  Model::Cache cache;
  const Tensor logits = model_.forward(x, /*training=*/true, &cache);
  Tensor grad_logits;
  const float loss = softmax_cross_entropy(logits, labels, &grad_logits);
  last_correct_ = count_correct(logits, labels);
  auto grads = model_.backward(cache, grad_logits);
  sgd_step(model_.params(), grads, state_, lr, cfg_);
  return loss;
}

TrainTrace train(Model& model, const TensorDataset& data,
                 const TrainConfig& cfg,
                 const std::function<void(const EpochStats&)>& on_epoch) {
  cfg.validate();
  if (data.size() == 0) throw std::invalid_argument("train: empty dataset");

  Trainer trainer(model, cfg);
  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  TrainTrace trace;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng shuffle_rng(substream_seed(cfg.seed, "epoch/" + std::to_string(epoch)));
    shuffle_rng.shuffle(order);
    const double lr = lr_at_epoch(epoch, cfg);

    double loss_sum = 0.0;
    int steps = 0;
    int correct = 0;
    for (std::size_t begin = 0; begin < order.size();
         begin += cfg.batch_size) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      Tensor x = make_batch(data, order, begin, end);
      std::vector<int> labels(end - begin);
      for (std::size_t i = begin; i < end; ++i) {
        labels[i - begin] = data.label(order[i]);
      }
      const double loss = trainer.step(x, labels, lr);
      if (!std::isfinite(loss)) {
        throw std::runtime_error("non-finite training loss at epoch " +
                                 std::to_string(epoch) + ", step " +
                                 std::to_string(steps) + ": " +
                                 std::to_string(loss));
      }
      loss_sum += loss;
      correct += trainer.last_correct();
      ++steps;
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.lr = lr;
    stats.mean_loss = loss_sum / steps;
    stats.accuracy = static_cast<double>(correct) / data.size();
    stats.steps = steps;
    trace.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return trace;
}

std::vector<int> predict(Model& model, const TensorDataset& data,
                         int batch_size) {
  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> preds(data.size());
  for (std::size_t begin = 0; begin < order.size();
       begin += static_cast<std::size_t>(batch_size)) {
    const std::size_t end =
        std::min(order.size(), begin + static_cast<std::size_t>(batch_size));
    Tensor x = make_batch(data, order, begin, end);
    const Tensor logits = model.forward(x, /*training=*/false, nullptr);
    const int k = logits.dim(1);
    for (std::size_t i = begin; i < end; ++i) {
      const float* row =
          logits.data.data() + (i - begin) * static_cast<std::size_t>(k);
      int arg = 0;
      for (int c = 1; c < k; ++c) {
        if (row[c] > row[arg]) arg = c;
      }
      preds[i] = arg;
    }
  }
  return preds;
}

}  // namespace rotorvib::nn
