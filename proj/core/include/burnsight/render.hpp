#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "burnsight/image.hpp"
#include "burnsight/lime.hpp"
#include "burnsight/saliency.hpp"
#include "burnsight/segmentation.hpp"

namespace burnsight::explain {

// Symmetric colormap limit: max |score| (0 when all scores are 0).
double colormap_limit(const std::vector<double>& scores);

// Blue-white-red diverging map over [-limit, limit]; 0 maps to white.
std::array<std::uint8_t, 3> diverging_color(double value, double limit);
inline constexpr std::array<std::uint8_t, 3> kNeutralColor = {255, 255, 255};

imaging::RgbImage render_heatmap(const Explanation& explanation, const segmentation::SegmentMap& segments);

// Segments with the K highest strictly positive scores, descending (lower
// segment id on ties).
std::vector<int> top_positive_segments(const Explanation& explanation, int k);

// Grayscale image with the top-K positive segments tinted green and their
// inner boundary drawn in yellow. Pixels outside those segments keep their
// gray value.
imaging::RgbImage render_overlay(const Explanation& explanation, const segmentation::SegmentMap& segments,
                                 const imaging::GrayImage& img, int k);

// Saliency scaled by its maximum to [0, 1].
imaging::GrayImage saliency_image(const SaliencyMap& map);

// {target_class, intercept, r2, scores: [{segment, score}]}, scores sorted
// by descending score then ascending segment id.
std::string scores_json(const Explanation& explanation);

}  // namespace burnsight::explain
