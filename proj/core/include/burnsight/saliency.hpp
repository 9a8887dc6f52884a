#pragma once

#include <vector>

#include "burnsight/fusion_model.hpp"
#include "burnsight/image.hpp"
#include "burnsight/texture.hpp"

namespace burnsight::explain {

struct SaliencyMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // non-negative, row-major

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

// |d logit(class) / d pixel| by reverse-mode differentiation through the
// pooling backbone, projection, hidden and output layers. The texture
// vector is evaluated on the image but held constant (quantization is not
// differentiable). Only builtin-pool models are supported.
SaliencyMap gradient_saliency(const model::FusionModel& model, const imaging::GrayImage& img,
                              int class_index);

// Logit of one class for the full image; the function the saliency map
// differentiates.
double class_logit(const model::FusionModel& model, const imaging::GrayImage& img, int class_index);

// Texture config matching how a model's v2 is computed.
texture::GlcmConfig glcm_config_for(const model::FusionModel& model);

}  // namespace burnsight::explain
