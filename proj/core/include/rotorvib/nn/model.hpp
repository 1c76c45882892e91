#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rotorvib/nn/kernels.hpp"
#include "rotorvib/nn/tensor.hpp"

namespace rotorvib::nn {

enum class LayerKind {
  Conv3x3,
  BatchNorm,
  ReLU,
  MaxPool2x2,
  GlobalAvgPool,
  Linear,
};

std::string_view to_string(LayerKind k);
LayerKind layer_kind_from_string(std::string_view name);

struct LayerDef {
  LayerKind kind;
  int in = 0;   // channels (Conv/BatchNorm) or input features (Linear)
  int out = 0;  // output channels / features
};

struct ModelSpec {
  std::vector<LayerDef> layers;
  double width_factor = 1.0;
  int input_side = 0;      // 0 for vector inputs (MLP)
  int input_channels = 3;  // image channels, or feature count for MLP
  int n_classes = 4;
};

/// VGG19 backbone with BatchNorm after every conv, channel widths scaled by
/// width_factor (rounded, min 1), global average pooling and a single linear
/// classifier head.
ModelSpec build_vgg19_gap(double width_factor, int input_side, int n_classes);

/// Fully connected baseline: in -> hidden... -> n_classes with ReLU.
ModelSpec build_mlp(int in_features, const std::vector<int>& hidden,
                    int n_classes);

/// Learnable parameter total (weights, biases, gamma, beta); running
/// statistics are excluded.
std::int64_t count_parameters(const ModelSpec& spec);

/// Runtime model: parameter storage, forward/backward over the layer list.
class Model {
 public:
  /// Fan-in scaled Gaussian init for weights (std = sqrt(2/fan_in)), zero
  /// biases/beta, unit gamma; all draws from the given seed.
  Model(ModelSpec spec, std::uint64_t init_seed);

  const ModelSpec& spec() const { return spec_; }
  std::vector<Tensor>& params() { return params_; }
  const std::vector<Tensor>& params() const { return params_; }
  std::vector<Tensor>& bn_running() { return bn_running_; }
  const std::vector<Tensor>& bn_running() const { return bn_running_; }

  struct Cache {
    std::vector<Tensor> inputs;  // input of each layer
    std::vector<BatchNormCache<float>> bn;
    std::vector<std::vector<std::int64_t>> pool_argmax;
    Tensor logits;
  };

  /// Forward pass; training mode uses batch statistics and updates running
  /// estimates. cache may be null for inference.
  Tensor forward(const Tensor& x, bool training, Cache* cache);

  /// Backward pass from the loss gradient at the logits; returns gradients
  /// aligned with params().
  std::vector<Tensor> backward(const Cache& cache, const Tensor& grad_logits);

  /// Flat copy of all parameters in layer order (checkpoint layout).
  std::vector<float> flat_parameters() const;
  void load_flat_parameters(const std::vector<float>& flat);

 private:
  ModelSpec spec_;
  std::vector<Tensor> params_;
  std::vector<Tensor> bn_running_;
  // per-layer index of the first tensor in params_ (or -1)
  std::vector<int> param_index_;
  std::vector<int> bn_index_;
};

}  // namespace rotorvib::nn
