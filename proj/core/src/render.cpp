#include "burnsight/render.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "burnsight/error.hpp"
#include "json.hpp"

namespace burnsight::explain {
using imaging::GrayImage;
using imaging::RgbImage;
using segmentation::SegmentMap;

namespace {

std::uint8_t channel(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0))); }

void check_dims(const Explanation& e, const SegmentMap& segments) {
  if (e.scores.size() != static_cast<std::size_t>(segments.count())) {
    throw UsageError("explanation has " + std::to_string(e.scores.size()) + " scores but the map has " +
                     std::to_string(segments.count()) + " segments");
  }
}

}  // namespace

double colormap_limit(const std::vector<double>& scores) {
  double limit = 0.0;
  for (const double s : scores) limit = std::max(limit, std::abs(s));
  return limit;
}

std::array<std::uint8_t, 3> diverging_color(double value, double limit) {
  if (!(limit > 0.0)) return kNeutralColor;
  const double t = std::clamp(value / limit, -1.0, 1.0);
  if (t >= 0.0) return {255, channel(255.0 * (1.0 - t)), channel(255.0 * (1.0 - t))};
  return {channel(255.0 * (1.0 + t)), channel(255.0 * (1.0 + t)), 255};
}

RgbImage render_heatmap(const Explanation& explanation, const SegmentMap& segments) {
  check_dims(explanation, segments);
  const double limit = colormap_limit(explanation.scores);
  std::vector<std::array<std::uint8_t, 3>> palette;
  palette.reserve(explanation.scores.size());
  for (const double s : explanation.scores) palette.push_back(diverging_color(s, limit));

  RgbImage out(segments.width(), segments.height());
  for (int y = 0; y < segments.height(); ++y) {
    for (int x = 0; x < segments.width(); ++x) {
      const auto& c = palette[segments.at(x, y)];
      std::copy(c.begin(), c.end(), out.pixel(x, y));
    }
  }
  return out;
}

std::vector<int> top_positive_segments(const Explanation& explanation, int k) {
  std::vector<int> ids;
  for (std::size_t s = 0; s < explanation.scores.size(); ++s) {
    if (explanation.scores[s] > 0.0) ids.push_back(static_cast<int>(s));
  }
  std::stable_sort(ids.begin(), ids.end(),
                   [&](int a, int b) { return explanation.scores[a] > explanation.scores[b]; });
  if (k >= 0 && ids.size() > static_cast<std::size_t>(k)) ids.resize(static_cast<std::size_t>(k));
  return ids;
}

RgbImage render_overlay(const Explanation& explanation, const SegmentMap& segments, const GrayImage& img,
                        int k) {
  check_dims(explanation, segments);
  if (img.width() != segments.width() || img.height() != segments.height()) {
    throw UsageError("overlay image does not match the segment map");
  }
  std::vector<bool> highlighted(explanation.scores.size(), false);
  for (const int s : top_positive_segments(explanation, k)) highlighted[s] = true;

  RgbImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double gray = 255.0 * img.at(x, y);
      std::uint8_t* px = out.pixel(x, y);
      const int label = segments.at(x, y);
      if (!highlighted[label]) {
        px[0] = px[1] = px[2] = channel(gray);
        continue;
      }
      const bool boundary = (x > 0 && segments.at(x - 1, y) != label) ||
                            (x + 1 < img.width() && segments.at(x + 1, y) != label) ||
                            (y > 0 && segments.at(x, y - 1) != label) ||
                            (y + 1 < img.height() && segments.at(x, y + 1) != label);
      if (boundary) {
        px[0] = 255;
        px[1] = 255;
        px[2] = 0;
      } else {
        px[0] = channel(0.6 * gray);
        px[1] = channel(0.6 * gray + 0.4 * 255.0);
        px[2] = channel(0.6 * gray);
      }
    }
  }
  return out;
}

GrayImage saliency_image(const SaliencyMap& map) {
  const double max_value =
      map.values.empty() ? 0.0 : *std::max_element(map.values.begin(), map.values.end());
  std::vector<double> scaled(map.values.size(), 0.0);
  if (max_value > 0.0) {
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = std::clamp(map.values[i] / max_value, 0.0, 1.0);
  }
  return GrayImage(map.width, map.height, std::move(scaled));
}

std::string scores_json(const Explanation& explanation) {
  std::vector<int> ids(explanation.scores.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(),
                   [&](int a, int b) { return explanation.scores[a] > explanation.scores[b]; });
  nlohmann::ordered_json doc;
  doc["target_class"] = explanation.target_class;
  doc["intercept"] = explanation.intercept;
  doc["r2"] = explanation.r2;
  doc["scores"] = nlohmann::ordered_json::array();
  for (const int id : ids) {
    doc["scores"].push_back({{"segment", id}, {"score", explanation.scores[id]}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace burnsight::explain
