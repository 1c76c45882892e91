#include "rotorvib/nn/model.hpp"

#include <cmath>
#include <stdexcept>

#include "rotorvib/rng.hpp"

namespace rotorvib::nn {

std::string_view to_string(LayerKind k) {
  switch (k) {
    case LayerKind::Conv3x3: return "conv3x3";
    case LayerKind::BatchNorm: return "batchnorm";
    case LayerKind::ReLU: return "relu";
    case LayerKind::MaxPool2x2: return "maxpool2x2";
    case LayerKind::GlobalAvgPool: return "gap";
    case LayerKind::Linear: return "linear";
  }
  throw std::invalid_argument("unknown layer kind");
}

LayerKind layer_kind_from_string(std::string_view name) {
  for (const LayerKind k :
       {LayerKind::Conv3x3, LayerKind::BatchNorm, LayerKind::ReLU,
        LayerKind::MaxPool2x2, LayerKind::GlobalAvgPool, LayerKind::Linear}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown layer kind: " + std::string(name));
}

ModelSpec build_vgg19_gap(double width_factor, int input_side, int n_classes) {
  if (!(width_factor > 0.0 && width_factor <= 1.0)) {
    throw std::invalid_argument("width_factor must be in (0, 1]");
  }
  if (input_side < 32) {
    throw std::invalid_argument("input_side must be >= 32 (five 2x2 pools)");
  }
  if (n_classes < 2) throw std::invalid_argument("n_classes must be >= 2");

  const std::vector<std::vector<int>> blocks = {
      {64, 64}, {128, 128}, {256, 256, 256, 256}, {512, 512, 512, 512},
      {512, 512, 512, 512}};

  ModelSpec spec;
  spec.width_factor = width_factor;
  spec.input_side = input_side;
  spec.input_channels = 3;
  spec.n_classes = n_classes;
  int in = 3;
  for (const auto& block : blocks) {
    for (const int base_ch : block) {
      const int ch = std::max(
          1, static_cast<int>(std::lround(base_ch * width_factor)));
      spec.layers.push_back({LayerKind::Conv3x3, in, ch});
      spec.layers.push_back({LayerKind::BatchNorm, ch, ch});
      spec.layers.push_back({LayerKind::ReLU, ch, ch});
      in = ch;
    }
    spec.layers.push_back({LayerKind::MaxPool2x2, in, in});
  }
  spec.layers.push_back({LayerKind::GlobalAvgPool, in, in});
  spec.layers.push_back({LayerKind::Linear, in, n_classes});
  return spec;
}

ModelSpec build_mlp(int in_features, const std::vector<int>& hidden,
                    int n_classes) {
  if (in_features < 1) throw std::invalid_argument("in_features must be >= 1");
  ModelSpec spec;
  spec.width_factor = 1.0;
  spec.input_side = 0;
  spec.input_channels = in_features;
  spec.n_classes = n_classes;
  int in = in_features;
  for (const int h : hidden) {
    if (h < 1) throw std::invalid_argument("hidden width must be >= 1");
    spec.layers.push_back({LayerKind::Linear, in, h});
    spec.layers.push_back({LayerKind::ReLU, h, h});
    in = h;
  }
  spec.layers.push_back({LayerKind::Linear, in, n_classes});
  return spec;
}

std::int64_t count_parameters(const ModelSpec& spec) {
  std::int64_t total = 0;
  for (const auto& l : spec.layers) {
    switch (l.kind) {
      case LayerKind::Conv3x3:
        total += 9LL * l.in * l.out + l.out;
        break;
      case LayerKind::BatchNorm:
        total += 2LL * l.out;
        break;
      case LayerKind::Linear:
        total += static_cast<std::int64_t>(l.in) * l.out + l.out;
        break;
      default:
        break;
    }
  }
  return total;
}

Model::Model(ModelSpec spec, std::uint64_t init_seed) : spec_(std::move(spec)) {
  Rng rng(init_seed);
  param_index_.assign(spec_.layers.size(), -1);
  bn_index_.assign(spec_.layers.size(), -1);
  for (std::size_t li = 0; li < spec_.layers.size(); ++li) {
    const auto& l = spec_.layers[li];
    switch (l.kind) {
      case LayerKind::Conv3x3: {
        param_index_[li] = static_cast<int>(params_.size());
        Tensor w({l.out, l.in, 3, 3});
        const double std_dev = std::sqrt(2.0 / (9.0 * l.in));
        for (auto& v : w.data) v = static_cast<float>(std_dev * rng.gaussian());
        Tensor b({l.out});
        params_.push_back(std::move(w));
        params_.push_back(std::move(b));
        break;
      }
      case LayerKind::BatchNorm: {
        param_index_[li] = static_cast<int>(params_.size());
        Tensor gamma({l.out});
        gamma.fill(1.0f);
        Tensor beta({l.out});
        params_.push_back(std::move(gamma));
        params_.push_back(std::move(beta));
        bn_index_[li] = static_cast<int>(bn_running_.size());
        Tensor rm({l.out});
        Tensor rv({l.out});
        rv.fill(1.0f);
        bn_running_.push_back(std::move(rm));
        bn_running_.push_back(std::move(rv));
        break;
      }
      case LayerKind::Linear: {
        param_index_[li] = static_cast<int>(params_.size());
        Tensor w({l.out, l.in});
        const double std_dev = std::sqrt(2.0 / l.in);
        for (auto& v : w.data) v = static_cast<float>(std_dev * rng.gaussian());
        Tensor b({l.out});
        params_.push_back(std::move(w));
        params_.push_back(std::move(b));
        break;
      }
      default:
        break;
    }
  }
}

Tensor Model::forward(const Tensor& x, bool training, Cache* cache) {
  if (cache) {
    cache->inputs.clear();
    cache->bn.assign(spec_.layers.size(), {});
    cache->pool_argmax.assign(spec_.layers.size(), {});
  }
  Tensor cur = x;
  for (std::size_t li = 0; li < spec_.layers.size(); ++li) {
    const auto& l = spec_.layers[li];
    // Collapse N,C,1,1-style activations to N,F at the linear boundary.
    if (l.kind == LayerKind::Linear && cur.shape.size() != 2) {
      const int batch = cur.dim(0);
      const auto feat = static_cast<int>(cur.numel() / batch);
      cur.shape = {batch, feat};
    }
    if (cache) cache->inputs.push_back(cur);
    Tensor next;
    const int pi = param_index_[li];
    switch (l.kind) {
      case LayerKind::Conv3x3:
        conv3x3_forward(cur, params_[pi], params_[pi + 1], next);
        break;
      case LayerKind::BatchNorm:
        batchnorm_forward(cur, params_[pi], params_[pi + 1],
                          bn_running_[bn_index_[li]],
                          bn_running_[bn_index_[li] + 1], training, 0.1, next,
                          cache ? &cache->bn[li] : nullptr);
        break;
      case LayerKind::ReLU:
        relu_forward(cur, next);
        break;
      case LayerKind::MaxPool2x2:
        maxpool2x2_forward(cur, next,
                           cache ? &cache->pool_argmax[li] : nullptr);
        break;
      case LayerKind::GlobalAvgPool:
        gap_forward(cur, next);
        break;
      case LayerKind::Linear:
        linear_forward(cur, params_[pi], params_[pi + 1], next);
        break;
    }
    cur = std::move(next);
  }
  if (cache) cache->logits = cur;
  return cur;
}

std::vector<Tensor> Model::backward(const Cache& cache,
                                    const Tensor& grad_logits) {
  if (cache.inputs.size() != spec_.layers.size()) {
    throw std::invalid_argument("backward: missing cached activations");
  }
  std::vector<Tensor> grads(params_.size());
  Tensor gcur = grad_logits;
  for (int li = static_cast<int>(spec_.layers.size()) - 1; li >= 0; --li) {
    const auto& l = spec_.layers[li];
    const Tensor& input = cache.inputs[li];
    const int pi = param_index_[li];
    Tensor gprev;
    switch (l.kind) {
      case LayerKind::Conv3x3: {
        Tensor gw, gb;
        conv3x3_backward(input, params_[pi], gcur, li > 0 ? &gprev : nullptr,
                         &gw, &gb);
        grads[pi] = std::move(gw);
        grads[pi + 1] = std::move(gb);
        break;
      }
      case LayerKind::BatchNorm: {
        Tensor gg, gb;
        batchnorm_backward(gcur, params_[pi], cache.bn[li],
                           li > 0 ? &gprev : nullptr, &gg, &gb);
        grads[pi] = std::move(gg);
        grads[pi + 1] = std::move(gb);
        break;
      }
      case LayerKind::ReLU:
        relu_backward(input, gcur, gprev);
        break;
      case LayerKind::MaxPool2x2:
        maxpool2x2_backward(gcur, cache.pool_argmax[li], input.shape, gprev);
        break;
      case LayerKind::GlobalAvgPool:
        gap_backward(gcur, input.shape, gprev);
        break;
      case LayerKind::Linear: {
        Tensor gw, gb;
        linear_backward(input, params_[pi], gcur, li > 0 ? &gprev : nullptr,
                        &gw, &gb);
        grads[pi] = std::move(gw);
        grads[pi + 1] = std::move(gb);
        break;
      }
    }
    if (li > 0) gcur = std::move(gprev);
  }
  return grads;
}

std::vector<float> Model::flat_parameters() const {
  std::vector<float> flat;
  flat.reserve(static_cast<std::size_t>(count_parameters(spec_)));
  for (const auto& p : params_) {
    flat.insert(flat.end(), p.data.begin(), p.data.end());
  }
  return flat;
}

void Model::load_flat_parameters(const std::vector<float>& flat) {
  const auto expected = static_cast<std::size_t>(count_parameters(spec_));
  if (flat.size() != expected) {
    throw std::runtime_error("parameter blob size mismatch");
  }
  std::size_t pos = 0;
  for (auto& p : params_) {
    std::copy(flat.begin() + pos, flat.begin() + pos + p.data.size(),
              p.data.begin());
    pos += p.data.size();
  }
}

}  // namespace rotorvib::nn
