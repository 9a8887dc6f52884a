#include "burnsight/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "burnsight/error.hpp"
#include "burnsight/image_io.hpp"
#include "burnsight/parallel.hpp"

namespace burnsight::segmentation {
using imaging::GrayImage;

SegmentMap::SegmentMap(int width, int height, std::vector<std::int32_t> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
  if (width < 1 || height < 1) throw UsageError("segment map needs positive dimensions");
  if (labels_.size() != static_cast<std::size_t>(width) * height) {
    throw UsageError("segment label count does not match dimensions");
  }
  std::int32_t max_label = -1;
  for (const auto label : labels_) {
    if (label < 0) throw UsageError("negative segment label");
    max_label = std::max(max_label, label);
  }
  count_ = max_label + 1;
  std::vector<bool> present(static_cast<std::size_t>(count_), false);
  for (const auto label : labels_) present[label] = true;
  if (std::find(present.begin(), present.end(), false) != present.end()) {
    throw UsageError("segment labels have gaps");
  }
}

SegmentMap SegmentMap::from_raw(int width, int height, const std::vector<std::int32_t>& raw) {
  std::unordered_map<std::int32_t, std::int32_t> remap;
  std::vector<std::int32_t> dense(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto [it, inserted] = remap.try_emplace(raw[i], static_cast<std::int32_t>(remap.size()));
    dense[i] = it->second;
  }
  return SegmentMap(width, height, std::move(dense));
}

std::vector<std::size_t> SegmentMap::segment_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(count_), 0);
  for (const auto label : labels_) ++sizes[label];
  return sizes;
}

void QuickshiftParams::validate() const {
  if (!(kernel_size > 0.0)) throw UsageError("quickshift kernel size must be > 0");
  if (!(max_dist > 0.0)) throw UsageError("quickshift max-dist must be > 0");
  if (!(intensity_weight >= 0.0)) throw UsageError("quickshift intensity weight must be >= 0");
}

void FelzenszwalbParams::validate() const {
  if (!(scale > 0.0)) throw UsageError("felzenszwalb scale must be > 0");
  if (!(sigma >= 0.0)) throw UsageError("felzenszwalb sigma must be >= 0");
  if (min_size < 1) throw UsageError("felzenszwalb min-size must be >= 1");
}

std::vector<double> quickshift_density(const GrayImage& img, const QuickshiftParams& params) {
  params.validate();
  const int w = img.width();
  const int h = img.height();
  const int radius = static_cast<int>(std::ceil(3.0 * params.kernel_size));
  const double inv_two_sigma2 = 1.0 / (2.0 * params.kernel_size * params.kernel_size);
  const double weight2 = params.intensity_weight * params.intensity_weight;

  const int span = 2 * radius + 1;
  std::vector<double> spatial(static_cast<std::size_t>(span) * span);
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      spatial[(dy + radius) * span + dx + radius] = std::exp(-(dx * dx + dy * dy) * inv_two_sigma2);
    }
  }

  std::vector<double> density(img.size(), 0.0);
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < w; ++x) {
      const double value = img.at(x, y);
      double sum = 0.0;
      for (int qy = std::max(0, y - radius); qy <= std::min(h - 1, y + radius); ++qy) {
        for (int qx = std::max(0, x - radius); qx <= std::min(w - 1, x + radius); ++qx) {
          const double di = img.at(qx, qy) - value;
          sum += spatial[(qy - y + radius) * span + qx - x + radius] *
                 std::exp(-weight2 * di * di * inv_two_sigma2);
        }
      }
      density[static_cast<std::size_t>(y) * w + x] = sum;
    }
  });
  return density;
}

std::vector<std::size_t> quickshift_links(const GrayImage& img, const QuickshiftParams& params) {
  const auto density = quickshift_density(img, params);
  const int w = img.width();
  const int h = img.height();
  const int radius = static_cast<int>(std::floor(params.max_dist));
  const double max_d2 = params.max_dist * params.max_dist;
  const double weight2 = params.intensity_weight * params.intensity_weight;

  std::vector<std::size_t> parent(img.size());
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      const double value = img.at(x, y);
      std::size_t best = p;
      double best_d2 = max_d2;
      bool found = false;
      for (int qy = std::max(0, y - radius); qy <= std::min(h - 1, y + radius); ++qy) {
        for (int qx = std::max(0, x - radius); qx <= std::min(w - 1, x + radius); ++qx) {
          const std::size_t q = static_cast<std::size_t>(qy) * w + qx;
          if (q == p) continue;
          const bool higher = density[q] > density[p] || (density[q] == density[p] && q < p);
          if (!higher) continue;
          const double di = img.at(qx, qy) - value;
          const double d2 = (qx - x) * (qx - x) + (qy - y) * (qy - y) + weight2 * di * di;
          // Scan order is row-major, so a strict comparison keeps the
          // smallest index among equidistant candidates.
          if (d2 < best_d2 || (!found && d2 <= best_d2)) {
            best = q;
            best_d2 = d2;
            found = true;
          }
        }
      }
      parent[p] = best;
    }
  });
  return parent;
}

SegmentMap segment_quickshift(const GrayImage& img, const QuickshiftParams& params) {
  if (img.empty()) throw UsageError("cannot segment an empty image");
  auto parent = quickshift_links(img, params);
  // Links point strictly up the (density, -index) order, so chains terminate.
  std::vector<std::int32_t> raw(parent.size());
  std::vector<std::size_t> path;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    std::size_t node = i;
    while (parent[node] != node) {
      path.push_back(node);
      node = parent[node];
    }
    for (const auto visited : path) parent[visited] = node;
    path.clear();
    raw[i] = static_cast<std::int32_t>(node);
  }
  return SegmentMap::from_raw(img.width(), img.height(), raw);
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1), internal_(n, 0.0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Union by size; the lower index wins ties so results are reproducible.
  std::size_t join(std::size_t a, std::size_t b, double weight) {
    if (size_[a] < size_[b] || (size_[a] == size_[b] && b < a)) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    internal_[a] = std::max({internal_[a], internal_[b], weight});
    return a;
  }

  std::size_t size(std::size_t root) const { return size_[root]; }
  double internal(std::size_t root) const { return internal_[root]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::vector<double> internal_;
};

struct Edge {
  double weight;
  std::uint32_t a;
  std::uint32_t b;
};

std::vector<double> gaussian_smooth(const GrayImage& img, double sigma) {
  const auto src = img.pixels();
  if (sigma <= 0.0) return {src.begin(), src.end()};
  const int w = img.width();
  const int h = img.height();
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  for (int i = -radius; i <= radius; ++i) kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
  const double total = std::accumulate(kernel.begin(), kernel.end(), 0.0);
  for (auto& k : kernel) k /= total;

  std::vector<double> tmp(src.size());
  std::vector<double> out(src.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sum = 0.0;
      for (int i = -radius; i <= radius; ++i) sum += kernel[i + radius] * img.at(std::clamp(x + i, 0, w - 1), y);
      tmp[static_cast<std::size_t>(y) * w + x] = sum;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sum = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        sum += kernel[i + radius] * tmp[static_cast<std::size_t>(std::clamp(y + i, 0, h - 1)) * w + x];
      }
      out[static_cast<std::size_t>(y) * w + x] = sum;
    }
  }
  return out;
}

}  // namespace

SegmentMap segment_felzenszwalb(const GrayImage& img, const FelzenszwalbParams& params) {
  params.validate();
  if (img.empty()) throw UsageError("cannot segment an empty image");
  const int w = img.width();
  const int h = img.height();
  const auto smooth = gaussian_smooth(img, params.sigma);

  std::vector<Edge> edges;
  edges.reserve(img.size() * 4);
  auto add_edge = [&](int x0, int y0, int x1, int y1) {
    const auto a = static_cast<std::uint32_t>(y0 * w + x0);
    const auto b = static_cast<std::uint32_t>(y1 * w + x1);
    edges.push_back({255.0 * std::abs(smooth[a] - smooth[b]), a, b});
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w) add_edge(x, y, x + 1, y);
      if (y + 1 < h) add_edge(x, y, x, y + 1);
      if (x + 1 < w && y + 1 < h) add_edge(x, y, x + 1, y + 1);
      if (x + 1 < w && y > 0) add_edge(x, y, x + 1, y - 1);
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& l, const Edge& r) {
    if (l.weight != r.weight) return l.weight < r.weight;
    if (l.a != r.a) return l.a < r.a;
    return l.b < r.b;
  });

  DisjointSets sets(img.size());
  for (const auto& e : edges) {
    const std::size_t a = sets.find(e.a);
    const std::size_t b = sets.find(e.b);
    if (a == b) continue;
    const double tau_a = sets.internal(a) + params.scale / static_cast<double>(sets.size(a));
    const double tau_b = sets.internal(b) + params.scale / static_cast<double>(sets.size(b));
    if (e.weight <= std::min(tau_a, tau_b)) sets.join(a, b, e.weight);
  }
  // Absorb undersized components into their most similar neighbour.
  const auto min_size = static_cast<std::size_t>(params.min_size);
  for (const auto& e : edges) {
    const std::size_t a = sets.find(e.a);
    const std::size_t b = sets.find(e.b);
    if (a != b && (sets.size(a) < min_size || sets.size(b) < min_size)) sets.join(a, b, e.weight);
  }

  std::vector<std::int32_t> raw(img.size());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = static_cast<std::int32_t>(sets.find(i));
  return SegmentMap::from_raw(w, h, raw);
}

SegmentMap segment_grid(const GrayImage& img, int rows, int cols) {
  if (rows < 1 || cols < 1) throw UsageError("grid rows and cols must be >= 1");
  if (rows > img.height() || cols > img.width()) {
    throw UsageError("grid " + std::to_string(rows) + "x" + std::to_string(cols) +
                     " exceeds image dimensions");
  }
  const int tile_h = img.height() / rows;
  const int tile_w = img.width() / cols;
  std::vector<std::int32_t> labels(img.size());
  for (int y = 0; y < img.height(); ++y) {
    const int r = std::min(y / tile_h, rows - 1);
    for (int x = 0; x < img.width(); ++x) {
      const int c = std::min(x / tile_w, cols - 1);
      labels[static_cast<std::size_t>(y) * img.width() + x] = r * cols + c;
    }
  }
  return SegmentMap(img.width(), img.height(), std::move(labels));
}

void save_segment_png(const SegmentMap& map, const std::filesystem::path& path) {
  if (map.count() > 65536) throw UsageError("too many segments for a 16-bit label image");
  std::vector<std::uint16_t> samples(map.labels().size());
  std::transform(map.labels().begin(), map.labels().end(), samples.begin(),
                 [](std::int32_t v) { return static_cast<std::uint16_t>(v); });
  imaging::save_png16(map.width(), map.height(), samples, path);
}

}  // namespace burnsight::segmentation
