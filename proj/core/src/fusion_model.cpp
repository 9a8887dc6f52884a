#include "burnsight/fusion_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "burnsight/error.hpp"
#include "burnsight/random.hpp"

namespace burnsight::model {

void ModelMetadata::validate() const {
  if (raw_dim < 1) throw UsageError("backbone dimension must be >= 1");
  if (class_names.size() != kOutputWidth) throw UsageError("model needs exactly 3 class names");
  if (glcm_levels < 2) throw UsageError("GLCM levels must be >= 2");
  const auto k = static_cast<std::size_t>(v2_dim());
  if (!v2_shift.empty() && v2_shift.size() != k) throw UsageError("v2 shift length mismatch");
  if (!v2_scale.empty() && v2_scale.size() != k) throw UsageError("v2 scale length mismatch");
  for (const double s : v2_scale) {
    if (!(s > 0.0) || !std::isfinite(s)) throw UsageError("v2 scale entries must be positive");
  }
}

FusionModel::FusionModel(ModelMetadata metadata) : metadata_(std::move(metadata)) {
  metadata_.validate();
  const int fused = kProjectionWidth + metadata_.v2_dim();
  const std::array<std::pair<int, int>, 3> dims = {
      {{metadata_.raw_dim, kProjectionWidth}, {fused, kHiddenWidth}, {kHiddenWidth, kOutputWidth}}};
  std::size_t offset = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    auto& s = shapes_[i];
    s.inputs = dims[i].first;
    s.outputs = dims[i].second;
    s.weight_offset = offset;
    offset += static_cast<std::size_t>(s.inputs) * s.outputs;
    s.bias_offset = offset;
    offset += static_cast<std::size_t>(s.outputs);
  }
  params_.assign(offset, 0.0);
}

FusionModel FusionModel::zeros(ModelMetadata metadata) { return FusionModel(std::move(metadata)); }

FusionModel FusionModel::initialize(ModelMetadata metadata, std::uint64_t seed) {
  FusionModel model(std::move(metadata));
  Rng rng(derive_seed(seed, 0x696e6974ULL));
  for (const Layer layer : {Layer::kProjection, Layer::kHidden, Layer::kOutput}) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(model.shape(layer).inputs));
    for (double& w : model.weights(layer)) w = rng.uniform(-bound, bound);
    for (double& b : model.bias(layer)) b = rng.uniform(-bound, bound);
  }
  model.round_to_float32();
  return model;
}

std::span<double> FusionModel::weights(Layer layer) {
  const auto& s = shape(layer);
  return std::span<double>(params_).subspan(s.weight_offset, static_cast<std::size_t>(s.inputs) * s.outputs);
}
std::span<const double> FusionModel::weights(Layer layer) const {
  const auto& s = shape(layer);
  return std::span<const double>(params_).subspan(s.weight_offset,
                                                  static_cast<std::size_t>(s.inputs) * s.outputs);
}
std::span<double> FusionModel::bias(Layer layer) {
  const auto& s = shape(layer);
  return std::span<double>(params_).subspan(s.bias_offset, static_cast<std::size_t>(s.outputs));
}
std::span<const double> FusionModel::bias(Layer layer) const {
  const auto& s = shape(layer);
  return std::span<const double>(params_).subspan(s.bias_offset, static_cast<std::size_t>(s.outputs));
}

void FusionModel::round_to_float32() {
  for (double& p : params_) p = static_cast<double>(static_cast<float>(p));
}

bool FusionModel::all_finite() const {
  return std::all_of(params_.begin(), params_.end(), [](double p) { return std::isfinite(p); });
}

bool operator==(const FusionModel& a, const FusionModel& b) {
  const auto& ma = a.metadata_;
  const auto& mb = b.metadata_;
  return ma.backbone == mb.backbone && ma.raw_dim == mb.raw_dim && ma.selection == mb.selection &&
         ma.class_names == mb.class_names && ma.glcm_levels == mb.glcm_levels &&
         ma.v2_shift == mb.v2_shift && ma.v2_scale == mb.v2_scale && a.params_ == b.params_;
}

std::array<double, kOutputWidth> softmax(const std::array<double, kOutputWidth>& logits) {
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  std::array<double, kOutputWidth> p{};
  double sum = 0.0;
  for (int c = 0; c < kOutputWidth; ++c) {
    p[c] = std::exp(logits[c] - max_logit);
    sum += p[c];
  }
  for (double& v : p) v /= sum;
  return p;
}

Prediction forward(const FusionModel& model, std::span<const double> v1_raw, std::span<const double> v2,
                   ForwardCache* cache) {
  if (v1_raw.size() != static_cast<std::size_t>(model.raw_dim())) {
    throw UsageError("backbone vector has " + std::to_string(v1_raw.size()) + " entries, model expects " +
                     std::to_string(model.raw_dim()));
  }
  if (v2.size() != static_cast<std::size_t>(model.v2_dim())) {
    throw UsageError("texture vector has " + std::to_string(v2.size()) + " entries, model expects " +
                     std::to_string(model.v2_dim()));
  }
  ForwardCache local;
  ForwardCache& c = cache != nullptr ? *cache : local;
  const auto& meta = model.metadata();

  const int fused_dim = kProjectionWidth + model.v2_dim();
  c.fused.assign(static_cast<std::size_t>(fused_dim), 0.0);
  {
    const auto w = model.weights(Layer::kProjection);
    const auto b = model.bias(Layer::kProjection);
    const std::size_t n = v1_raw.size();
    for (int k = 0; k < kProjectionWidth; ++k) {
      const double* row = w.data() + static_cast<std::size_t>(k) * n;
      double sum = b[k];
      for (std::size_t r = 0; r < n; ++r) sum += row[r] * v1_raw[r];
      c.fused[k] = sum;
    }
  }
  for (std::size_t i = 0; i < v2.size(); ++i) {
    const double shift = meta.v2_shift.empty() ? 0.0 : meta.v2_shift[i];
    const double scale = meta.v2_scale.empty() ? 1.0 : meta.v2_scale[i];
    c.fused[kProjectionWidth + i] = (v2[i] - shift) / scale;
  }

  c.hidden_pre.resize(kHiddenWidth);
  c.hidden.resize(kHiddenWidth);
  {
    const auto w = model.weights(Layer::kHidden);
    const auto b = model.bias(Layer::kHidden);
    for (int j = 0; j < kHiddenWidth; ++j) {
      const double* row = w.data() + static_cast<std::size_t>(j) * fused_dim;
      double sum = b[j];
      for (int i = 0; i < fused_dim; ++i) sum += row[i] * c.fused[i];
      c.hidden_pre[j] = sum;
      c.hidden[j] = sum > 0.0 ? sum : 0.0;
    }
  }
  {
    const auto w = model.weights(Layer::kOutput);
    const auto b = model.bias(Layer::kOutput);
    for (int o = 0; o < kOutputWidth; ++o) {
      const double* row = w.data() + static_cast<std::size_t>(o) * kHiddenWidth;
      double sum = b[o];
      for (int j = 0; j < kHiddenWidth; ++j) sum += row[j] * c.hidden[j];
      c.logits[o] = sum;
    }
  }

  Prediction prediction;
  prediction.probabilities = softmax(c.logits);
  prediction.predicted_class = static_cast<int>(
      std::max_element(prediction.probabilities.begin(), prediction.probabilities.end()) -
      prediction.probabilities.begin());
  return prediction;
}

double cross_entropy(const Prediction& prediction, int label) {
  if (label < 0 || label >= kOutputWidth) throw UsageError("label out of range");
  return -std::log(std::max(prediction.probabilities[label], 1e-300));
}

void backward(const FusionModel& model, std::span<const double> v1_raw, const ForwardCache& cache,
              const std::array<double, kOutputWidth>& logit_grad, double scale,
              std::span<double> param_grad, std::span<double> raw_grad) {
  const bool want_params = !param_grad.empty();
  if (want_params && param_grad.size() != model.parameter_count()) {
    throw UsageError("gradient buffer does not match parameter count");
  }
  if (!raw_grad.empty() && raw_grad.size() != v1_raw.size()) {
    throw UsageError("raw gradient buffer does not match backbone dimension");
  }
  const int fused_dim = kProjectionWidth + model.v2_dim();

  // Output layer.
  std::vector<double> d_hidden(kHiddenWidth, 0.0);
  {
    const auto& s = model.shape(Layer::kOutput);
    const auto w = model.weights(Layer::kOutput);
    for (int o = 0; o < kOutputWidth; ++o) {
      const double g = logit_grad[o];
      if (g == 0.0) continue;
      const double* row = w.data() + static_cast<std::size_t>(o) * kHiddenWidth;
      for (int j = 0; j < kHiddenWidth; ++j) d_hidden[j] += row[j] * g;
      if (want_params) {
        double* gw = param_grad.data() + s.weight_offset + static_cast<std::size_t>(o) * kHiddenWidth;
        for (int j = 0; j < kHiddenWidth; ++j) gw[j] += scale * g * cache.hidden[j];
        param_grad[s.bias_offset + o] += scale * g;
      }
    }
  }

  // Hidden layer through the ReLU.
  std::vector<double> d_fused(static_cast<std::size_t>(fused_dim), 0.0);
  {
    const auto& s = model.shape(Layer::kHidden);
    const auto w = model.weights(Layer::kHidden);
    for (int j = 0; j < kHiddenWidth; ++j) {
      if (cache.hidden_pre[j] <= 0.0) continue;
      const double g = d_hidden[j];
      if (g == 0.0) continue;
      const double* row = w.data() + static_cast<std::size_t>(j) * fused_dim;
      for (int i = 0; i < kProjectionWidth; ++i) d_fused[i] += row[i] * g;
      if (want_params) {
        double* gw = param_grad.data() + s.weight_offset + static_cast<std::size_t>(j) * fused_dim;
        for (int i = 0; i < fused_dim; ++i) gw[i] += scale * g * cache.fused[i];
        param_grad[s.bias_offset + j] += scale * g;
      }
    }
  }

  // Projection layer.
  {
    const auto& s = model.shape(Layer::kProjection);
    const auto w = model.weights(Layer::kProjection);
    const std::size_t n = v1_raw.size();
    if (!raw_grad.empty()) std::fill(raw_grad.begin(), raw_grad.end(), 0.0);
    for (int k = 0; k < kProjectionWidth; ++k) {
      const double g = d_fused[k];
      if (g == 0.0) continue;
      const double* row = w.data() + static_cast<std::size_t>(k) * n;
      if (!raw_grad.empty()) {
        for (std::size_t r = 0; r < n; ++r) raw_grad[r] += row[r] * g;
      }
      if (want_params) {
        double* gw = param_grad.data() + s.weight_offset + static_cast<std::size_t>(k) * n;
        for (std::size_t r = 0; r < n; ++r) gw[r] += scale * g * v1_raw[r];
        param_grad[s.bias_offset + k] += scale * g;
      }
    }
  }
}

}  // namespace burnsight::model
