#include "burnsight/saliency.hpp"

#include <cmath>

#include "burnsight/backbone.hpp"
#include "burnsight/error.hpp"

namespace burnsight::explain {

texture::GlcmConfig glcm_config_for(const model::FusionModel& model) {
  texture::GlcmConfig config;
  config.levels = model.metadata().glcm_levels;
  return config;
}

namespace {

void check_request(const model::FusionModel& model, int class_index) {
  if (model.metadata().backbone != model::BackboneKind::kBuiltinPool) {
    throw UsageError("gradient saliency needs the builtin-pool backbone; feature-file models are not differentiable end to end");
  }
  if (class_index < 0 || class_index >= model::kOutputWidth) throw UsageError("class index out of range");
}

}  // namespace

double class_logit(const model::FusionModel& model, const imaging::GrayImage& img, int class_index) {
  check_request(model, class_index);
  const auto v1 = model::builtin_backbone(img);
  const auto v2 = texture::texture_vector(img, glcm_config_for(model), model.metadata().selection);
  model::ForwardCache cache;
  model::forward(model, v1, v2, &cache);
  return cache.logits[class_index];
}

SaliencyMap gradient_saliency(const model::FusionModel& model, const imaging::GrayImage& img,
                              int class_index) {
  check_request(model, class_index);
  const auto v1 = model::builtin_backbone(img);
  const auto v2 = texture::texture_vector(img, glcm_config_for(model), model.metadata().selection);
  model::ForwardCache cache;
  model::forward(model, v1, v2, &cache);

  std::array<double, model::kOutputWidth> seed{};
  seed[class_index] = 1.0;
  std::vector<double> raw_grad(v1.size());
  model::backward(model, v1, cache, seed, 0.0, {}, raw_grad);

  SaliencyMap map{img.width(), img.height(), std::vector<double>(img.size())};
  constexpr double kInvPatch = 1.0 / (model::kPoolPatch * model::kPoolPatch);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const std::size_t k = static_cast<std::size_t>(y / model::kPoolPatch) * model::kPoolGrid +
                            static_cast<std::size_t>(x / model::kPoolPatch);
      map.values[static_cast<std::size_t>(y) * img.width() + x] = std::abs(raw_grad[k] * kInvPatch);
    }
  }
  return map;
}

}  // namespace burnsight::explain
