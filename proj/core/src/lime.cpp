#include "burnsight/lime.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "burnsight/error.hpp"
#include "burnsight/linalg.hpp"
#include "burnsight/parallel.hpp"
#include "burnsight/random.hpp"

namespace burnsight::explain {
using imaging::GrayImage;
using segmentation::SegmentMap;

MaskMatrix sample_masks(int count, int num_segments, std::uint64_t seed) {
  if (count < 1) throw UsageError("mask count must be >= 1");
  if (num_segments < 1) throw UsageError("mask needs at least one segment");
  MaskMatrix masks{count, num_segments,
                   std::vector<std::uint8_t>(static_cast<std::size_t>(count) * num_segments, 1)};
  Rng rng(derive_seed(seed, 0x6d61736bULL));
  for (std::size_t i = static_cast<std::size_t>(num_segments); i < masks.bits.size(); ++i) {
    masks.bits[i] = rng.bit() ? 1 : 0;
  }
  return masks;
}

namespace {

void check_segments(const GrayImage& img, const SegmentMap& segments) {
  if (img.width() != segments.width() || img.height() != segments.height()) {
    throw UsageError("segment map does not match image dimensions");
  }
}

std::vector<double> fill_values(const GrayImage& img, const SegmentMap& segments, FillMode fill) {
  std::vector<double> values(static_cast<std::size_t>(segments.count()), fill.value);
  if (fill.kind == FillMode::Kind::kConstant) {
    if (!(fill.value >= 0.0 && fill.value <= 1.0)) throw UsageError("constant fill must be in [0,1]");
    return values;
  }
  std::vector<double> sums(values.size(), 0.0);
  std::vector<std::size_t> counts(values.size(), 0);
  const auto pixels = img.pixels();
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    sums[segments.labels()[i]] += pixels[i];
    ++counts[segments.labels()[i]];
  }
  for (std::size_t s = 0; s < values.size(); ++s) values[s] = std::clamp(sums[s] / counts[s], 0.0, 1.0);
  return values;
}

GrayImage masked_image(const GrayImage& img, const SegmentMap& segments, std::span<const std::uint8_t> mask,
                       const std::vector<double>& fills) {
  const auto pixels = img.pixels();
  std::vector<double> out(pixels.begin(), pixels.end());
  const auto& labels = segments.labels();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (mask[labels[i]] == 0) out[i] = fills[labels[i]];
  }
  return GrayImage(img.width(), img.height(), std::move(out));
}

// Weighted R^2 of a fit restricted to `columns`.
double weighted_r2(const MaskMatrix& masks, std::span<const double> y, std::span<const double> w,
                   const RidgeFit& fit, std::span<const int> columns) {
  const double total_w = std::accumulate(w.begin(), w.end(), 0.0);
  double y_mean = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) y_mean += w[i] * y[i];
  y_mean /= total_w;
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (int i = 0; i < masks.rows; ++i) {
    const auto row = masks.row(i);
    double pred = fit.intercept;
    for (std::size_t j = 0; j < columns.size(); ++j) pred += fit.coefficients[j] * row[columns[j]];
    ss_res += w[i] * (y[i] - pred) * (y[i] - pred);
    ss_tot += w[i] * (y[i] - y_mean) * (y[i] - y_mean);
  }
  if (ss_tot <= 0.0) return ss_res <= 0.0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

}  // namespace

GrayImage apply_mask(const GrayImage& img, const SegmentMap& segments, std::span<const std::uint8_t> mask,
                     FillMode fill) {
  check_segments(img, segments);
  if (mask.size() != static_cast<std::size_t>(segments.count())) {
    throw UsageError("mask length " + std::to_string(mask.size()) + " does not match " +
                     std::to_string(segments.count()) + " segments");
  }
  return masked_image(img, segments, mask, fill_values(img, segments, fill));
}

double kernel_weight(std::span<const std::uint8_t> mask, double kernel_width) {
  if (mask.empty()) throw UsageError("kernel weight needs a non-empty mask");
  if (!(kernel_width > 0.0)) throw UsageError("kernel width must be > 0");
  const auto ones = std::count_if(mask.begin(), mask.end(), [](std::uint8_t b) { return b != 0; });
  const double distance = 1.0 - std::sqrt(static_cast<double>(ones) / static_cast<double>(mask.size()));
  return std::exp(-(distance * distance) / (kernel_width * kernel_width));
}

void LimeConfig::validate() const {
  if (num_samples < 10) throw UsageError("LIME needs at least 10 samples");
  if (!(kernel_width > 0.0)) throw UsageError("kernel width must be > 0");
  if (!(ridge_lambda >= 0.0)) throw UsageError("ridge lambda must be >= 0");
  if (top_k < 1) throw UsageError("top-K must be >= 1");
}

Explanation fit_surrogate(const MaskMatrix& masks, std::span<const double> predictions,
                          std::span<const double> weights, double lambda, int top_k) {
  if (predictions.size() != static_cast<std::size_t>(masks.rows) || weights.size() != predictions.size()) {
    throw UsageError("masks, predictions and weights must have the same number of rows");
  }
  if (masks.rows < masks.cols + 1) {
    throw UsageError("surrogate fit needs at least num-segments + 1 samples");
  }
  if (top_k < 1) throw UsageError("top-K must be >= 1");

  std::vector<double> design(masks.bits.begin(), masks.bits.end());
  const RidgeFit full = weighted_ridge(design, masks.cols, predictions, weights, lambda);

  std::vector<int> order(static_cast<std::size_t>(masks.cols));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(full.coefficients[a]) > std::abs(full.coefficients[b]);
  });
  order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(top_k)));

  const RidgeFit restricted = weighted_ridge(design, masks.cols, predictions, weights, lambda, order);

  Explanation e;
  e.scores.assign(static_cast<std::size_t>(masks.cols), 0.0);
  for (std::size_t j = 0; j < order.size(); ++j) e.scores[order[j]] = restricted.coefficients[j];
  e.intercept = restricted.intercept;
  e.r2 = weighted_r2(masks, predictions, weights, restricted, order);
  const auto [lo, hi] = std::minmax_element(weights.begin(), weights.end());
  e.min_weight = *lo;
  e.max_weight = *hi;
  e.selected = std::move(order);
  return e;
}

Explanation explain(const Classifier& classifier, const GrayImage& img, const SegmentMap& segments,
                    const LimeConfig& config) {
  config.validate();
  check_segments(img, segments);
  if (!classifier.predict) throw UsageError("classifier has no predict function");

  const MaskMatrix masks = sample_masks(config.num_samples, segments.count(), config.seed);
  const auto fills = fill_values(img, segments, config.fill);

  const std::vector<double> base = classifier.predict(img);
  if (base.empty()) throw Error("classifier returned no probabilities");
  int target = static_cast<int>(std::max_element(base.begin(), base.end()) - base.begin());
  if (config.target_class) {
    target = *config.target_class;
    if (target < 0 || static_cast<std::size_t>(target) >= base.size()) {
      throw UsageError("target class " + std::to_string(target) + " out of range");
    }
  }

  std::vector<double> predictions(static_cast<std::size_t>(masks.rows));
  std::vector<double> weights(predictions.size());
  predictions[0] = base[target];
  auto run_sample = [&](std::size_t i) {
    const auto mask = masks.row(static_cast<int>(i));
    weights[i] = kernel_weight(mask, config.kernel_width);
    if (i == 0) return;
    const auto probs = classifier.predict(masked_image(img, segments, mask, fills));
    if (static_cast<std::size_t>(target) >= probs.size()) {
      throw Error("classifier output too short at sample " + std::to_string(i));
    }
    predictions[i] = probs[target];
  };
  parallel_for(predictions.size(), run_sample, classifier.concurrent ? thread_count() : 1);

  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (!std::isfinite(predictions[i])) {
      throw Error("classifier returned a non-finite value at sample " + std::to_string(i));
    }
  }

  Explanation e = fit_surrogate(masks, predictions, weights, config.ridge_lambda, config.top_k);
  e.target_class = target;
  return e;
}

}  // namespace burnsight::explain
