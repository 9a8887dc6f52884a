#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "burnsight/backbone.hpp"
#include "burnsight/texture.hpp"

namespace burnsight::model {

inline constexpr int kProjectionWidth = 30;
inline constexpr int kHiddenWidth = 1024;
inline constexpr int kOutputWidth = 3;

struct ModelMetadata {
  BackboneKind backbone = BackboneKind::kBuiltinPool;
  int raw_dim = kBuiltinDim;
  texture::FeatureSelection selection;
  std::vector<std::string> class_names = {"full_thickness", "partial_thickness", "unburnt"};
  int glcm_levels = 32;
  // Fixed affine map applied to v2 before concatenation: (v2 - shift) / scale.
  // Identity unless training fits it to the train split.
  std::vector<double> v2_shift;
  std::vector<double> v2_scale;

  int v2_dim() const { return static_cast<int>(selection.size()); }
  void validate() const;
};

enum class Layer { kProjection = 0, kHidden = 1, kOutput = 2 };

struct LayerShape {
  int inputs = 0;
  int outputs = 0;
  std::size_t weight_offset = 0;  // outputs x inputs, row-major
  std::size_t bias_offset = 0;
};

// Projection raw -> 30, hidden (30 + |v2|) -> 1024 with ReLU, output
// 1024 -> 3. All parameters live in one flat vector in declaration order:
// projection W, b, hidden W, b, output W, b.
class FusionModel {
 public:
  // Fan-in scaled uniform init, U(-1/sqrt(fan_in), 1/sqrt(fan_in)), rounded
  // to float32 so checkpoints reproduce it exactly.
  static FusionModel initialize(ModelMetadata metadata, std::uint64_t seed);
  static FusionModel zeros(ModelMetadata metadata);

  const ModelMetadata& metadata() const noexcept { return metadata_; }
  ModelMetadata& metadata() noexcept { return metadata_; }
  int raw_dim() const noexcept { return metadata_.raw_dim; }
  int v2_dim() const noexcept { return metadata_.v2_dim(); }

  const LayerShape& shape(Layer layer) const { return shapes_[static_cast<int>(layer)]; }
  std::span<double> weights(Layer layer);
  std::span<const double> weights(Layer layer) const;
  std::span<double> bias(Layer layer);
  std::span<const double> bias(Layer layer) const;

  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }

  void round_to_float32();
  bool all_finite() const;

  friend bool operator==(const FusionModel& a, const FusionModel& b);

 private:
  explicit FusionModel(ModelMetadata metadata);

  ModelMetadata metadata_;
  std::array<LayerShape, 3> shapes_{};
  std::vector<double> params_;
};

struct Prediction {
  std::array<double, kOutputWidth> probabilities{};
  int predicted_class = 0;  // argmax, lowest index on ties
};

// Intermediate activations kept for backpropagation.
struct ForwardCache {
  std::vector<double> fused;       // projected v1 followed by normalized v2
  std::vector<double> hidden_pre;  // before ReLU
  std::vector<double> hidden;      // after ReLU
  std::array<double, kOutputWidth> logits{};
};

std::array<double, kOutputWidth> softmax(const std::array<double, kOutputWidth>& logits);

// softmax(output(relu(hidden(concat(project(v1_raw), normalize(v2)))))).
// Throws UsageError on dimension mismatch.
Prediction forward(const FusionModel& model, std::span<const double> v1_raw,
                   std::span<const double> v2, ForwardCache* cache = nullptr);

double cross_entropy(const Prediction& prediction, int label);

// Reverse pass from d(objective)/d(logits). Adds scale * parameter gradients
// into param_grad (same layout as parameters()) when it is non-empty, and
// writes d(objective)/d(v1_raw) into raw_grad when it is non-empty.
void backward(const FusionModel& model, std::span<const double> v1_raw, const ForwardCache& cache,
              const std::array<double, kOutputWidth>& logit_grad, double scale,
              std::span<double> param_grad, std::span<double> raw_grad = {});

}  // namespace burnsight::model
