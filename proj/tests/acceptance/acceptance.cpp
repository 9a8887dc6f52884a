#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "burnsight/adam.hpp"
#include "burnsight/checkpoint.hpp"
#include "burnsight/error.hpp"
#include "burnsight/fvec.hpp"
#include "burnsight/lime.hpp"
#include "burnsight/pipeline.hpp"
#include "burnsight/render.hpp"
#include "burnsight/saliency.hpp"
#include "burnsight/segmentation.hpp"
#include "burnsight/studentized_range.hpp"
#include "burnsight/synth.hpp"
#include "burnsight/texture.hpp"
#include "burnsight/train.hpp"
#include "burnsight/tukey.hpp"
#include "cli.hpp"
#include "test_support.hpp"

using namespace burnsight;
using burnsight::imaging::GrayImage;
using burnsight::testing::TempDir;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

Outcome a1_glcm_oracle() {
  const auto start = Clock::now();
  const texture::GlcmConfig cfg{8};
  double worst = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto img = burnsight::testing::random_image(16, 16, 1000 + s);
    const auto glcm = texture::compute_glcm(texture::quantize(img, 8), cfg);
    const auto oracle = burnsight::testing::naive_glcm(img, 8, cfg.offsets, cfg.symmetric);
    for (std::size_t k = 0; k < oracle.size(); ++k) worst = std::max(worst, std::abs(glcm.p[k] - oracle[k]));
    const auto f = texture::haralick_features(glcm);
    const auto o = burnsight::testing::naive_haralick(oracle, 8);
    for (const auto [x, y] : {std::pair{f.contrast, o.contrast},
                              {f.dissimilarity, o.dissimilarity},
                              {f.homogeneity, o.homogeneity},
                              {f.asm_, o.asm_},
                              {f.energy, o.energy}}) {
      worst = std::max(worst, std::abs(x - y));
    }
  }
  const double t = seconds_since(start);
  return {worst <= 1e-12 && t < 5.0, fmt("max abs diff %.3g, %.2f s", worst, t)};
}

Outcome a2_fusion_improvement() {
  const auto start = Clock::now();
  TempDir dir("bs-accept");
  imaging::SynthConfig synth;
  synth.per_class_count = 300;
  synth.test_per_class = 100;
  synth.seed = 0;
  imaging::generate_synthetic_dataset(synth, dir.path());

  pipeline::RunSpec spec;
  spec.manifest = dir / "manifest.csv";
  spec.selections = {"none", "all"};
  spec.seeds = {0, 1, 2, 3, 4, 5};
  spec.train.learning_rate = 1e-3;
  spec.train.epochs = 30;
  const auto table = pipeline::extract_features(imaging::load_manifest(spec.manifest),
                                                model::BackboneSource::parse("builtin"));
  const auto reports = pipeline::run_grid(spec, table);
  const double none = reports[0].summary(evalstats::Metric::kAccuracy).mean;
  const double all = reports[1].summary(evalstats::Metric::kAccuracy).mean;
  const double t = seconds_since(start);
  return {all - none >= 0.05 && all >= 0.90 && t < 600.0,
          fmt("mean acc none %.4f, all %.4f", none, all) + fmt(", %.0f s", t)};
}

Outcome a3_tukey_md() {
  std::vector<evalstats::TukeyGroup> groups;
  for (const auto& row : burnsight::testing::kReferenceMeans)
    groups.push_back({row.name, burnsight::testing::samples_with_mean(row.mean_accuracy, 6, 0.004)});
  const auto pairs = evalstats::tukey_hsd(groups);
  double worst = 0;
  bool names = pairs.size() == burnsight::testing::kReferencePairs.size();
  for (std::size_t i = 0; names && i < pairs.size(); ++i) {
    const auto& ref = burnsight::testing::kReferencePairs[i];
    names = pairs[i].group_i == ref.i && pairs[i].group_j == ref.j;
    worst = std::max(worst, std::abs(pairs[i].mean_difference - ref.md));
  }
  return {names && worst <= 1e-4, fmt("%.0f pairs, max MD error %.2g", static_cast<double>(pairs.size()), worst)};
}

Outcome a4_studentized_range() {
  const double f = evalstats::studentized_range_cdf(3.877, 3, 10);
  bool monotone = true;
  double min_tail = 1.0;
  for (int k : {2, 3, 5, 10}) {
    for (double df : {5.0, 10.0, 20.0, 60.0, std::numeric_limits<double>::infinity()}) {
      double prev = 0;
      for (int i = 1; i <= 100; ++i) {
        const double v = evalstats::studentized_range_cdf(0.08 * i, k, df);
        monotone = monotone && v >= prev - 1e-12;
        prev = v;
      }
      min_tail = std::min(min_tail, evalstats::studentized_range_cdf(100.0, k, df));
    }
  }
  return {f >= 0.945 && f <= 0.955 && monotone && min_tail > 1.0 - 1e-6,
          fmt("F(3.877;3,10) = %.5f, min F(100) over df>=5 = 1 - %.2g", f, 1.0 - min_tail) +
              (monotone ? ", monotone" : ", NOT monotone")};
}

Outcome a5_pointing_game() {
  const int w = 32;
  const auto seg_img = burnsight::testing::random_image(w, w, 0);
  const auto segments = segmentation::segment_grid(seg_img, 2, 2);
  const int target_segment = segments.at(w - 1, w - 1);
  explain::Classifier rigged{[w](const GrayImage& img) {
                               double s = 0;
                               for (int y = w / 2; y < w; ++y)
                                 for (int x = w / 2; x < w; ++x) s += img.at(x, y);
                               const double p = s / (w * w / 4.0);
                               return std::vector<double>{p, 1 - p};
                             },
                             true};
  int hits = 0;
  for (int run = 0; run < 20; ++run) {
    const auto img = burnsight::testing::random_image(w, w, 100 + run);
    explain::LimeConfig cfg;
    cfg.num_samples = 1000;
    cfg.seed = static_cast<std::uint64_t>(run);
    cfg.fill = explain::FillMode::constant(0.0);
    cfg.target_class = 0;
    const auto e = explain::explain(rigged, img, segments, cfg);
    const auto top = explain::top_positive_segments(e, 1);
    hits += !top.empty() && top[0] == target_segment;
  }
  explain::Classifier constant{[](const GrayImage&) { return std::vector<double>{0.3, 0.7}; }, true};
  explain::LimeConfig cfg;
  cfg.num_samples = 1000;
  const auto flat = explain::explain(constant, burnsight::testing::random_image(w, w, 9), segments, cfg);
  const double max_flat = explain::colormap_limit(flat.scores);
  return {hits >= 19 && max_flat < 1e-9, fmt("top-1 hits %.0f/20, constant max|score| %.2g", hits, max_flat)};
}

Outcome a6_surrogate_recovery() {
  double worst = 0;
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    const int d = 6;
    std::mt19937_64 gen(trial);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> beta(d);
    for (auto& b : beta) b = u(gen);
    const double intercept = u(gen);
    const auto masks = explain::sample_masks(400, d, trial);
    std::vector<double> y(masks.rows), wts(masks.rows);
    Eigen::MatrixXd x(masks.rows, d + 1);
    for (int i = 0; i < masks.rows; ++i) {
      y[i] = intercept;
      x(i, 0) = 1;
      for (int j = 0; j < d; ++j) {
        y[i] += beta[j] * masks.row(i)[j];
        x(i, j + 1) = masks.row(i)[j];
      }
      wts[i] = explain::kernel_weight(masks.row(i), 0.25);
    }
    const double lambda = 1e-8;
    const auto e = explain::fit_surrogate(masks, y, wts, lambda, d);
    const Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(wts.data(), masks.rows);
    const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), masks.rows);
    Eigen::MatrixXd a = x.transpose() * wv.asDiagonal() * x;
    for (int j = 1; j <= d; ++j) a(j, j) += lambda;
    const Eigen::VectorXd oracle = a.ldlt().solve(x.transpose() * wv.asDiagonal() * yv);
    worst = std::max(worst, std::abs(e.intercept - oracle(0)));
    for (int j = 0; j < d; ++j) worst = std::max(worst, std::abs(e.scores[j] - oracle(j + 1)));
  }
  return {worst <= 1e-6, fmt("max coefficient error vs WLS oracle %.2g", worst)};
}

double relative_error(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); }

Outcome a7_gradients() {
  double worst_param = 0;
  double worst_pixel = 0;
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    std::mt19937_64 gen(trial);
    std::uniform_real_distribution<double> u(-1, 1);
    model::ModelMetadata meta;
    meta.backbone = model::BackboneKind::kFeatureFile;
    meta.raw_dim = 5;
    meta.selection = texture::FeatureSelection::parse("contrast,energy");
    auto m = model::FusionModel::initialize(meta, trial);
    model::TrainingSet data{5, 2, {}, {}, {}};
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 5; ++k) data.v1.push_back(u(gen));
      for (int k = 0; k < 2; ++k) data.v2.push_back(u(gen));
      data.labels.push_back(i % 3);
    }
    std::vector<double> grad(m.parameter_count()), scratch(m.parameter_count());
    model::loss_and_gradient(m, data, {}, grad);
    for (auto layer : {model::Layer::kProjection, model::Layer::kHidden, model::Layer::kOutput}) {
      for (bool bias : {false, true}) {
        const auto span = bias ? m.bias(layer) : m.weights(layer);
        const auto base = static_cast<std::size_t>(span.data() - m.parameters().data());
        for (int k = 0; k < 10; ++k) {
          const std::size_t idx = base + gen() % span.size();
          const double saved = m.parameters()[idx];
          m.parameters()[idx] = saved + 1e-4;
          const double up = model::loss_and_gradient(m, data, {}, scratch);
          m.parameters()[idx] = saved - 1e-4;
          const double down = model::loss_and_gradient(m, data, {}, scratch);
          m.parameters()[idx] = saved;
          worst_param = std::max(worst_param, relative_error((up - down) / 2e-4, grad[idx]));
        }
      }
    }

    model::ModelMetadata pool;
    pool.selection = texture::FeatureSelection::parse("homogeneity");
    const auto pm = model::FusionModel::initialize(pool, 10 + trial);
    std::vector<double> px(224 * 224);
    for (auto& v : px) v = (static_cast<double>(gen() % 32) + 0.5) / 32.0;
    const GrayImage img(224, 224, px);
    const int cls = static_cast<int>(trial % 3);
    const auto sal = explain::gradient_saliency(pm, img, cls);
    for (int k = 0; k < 10; ++k) {
      const std::size_t at = gen() % px.size();
      auto p = px;
      p[at] += 1e-4;
      const double up = explain::class_logit(pm, GrayImage(224, 224, p), cls);
      p[at] -= 2e-4;
      const double down = explain::class_logit(pm, GrayImage(224, 224, p), cls);
      worst_pixel = std::max(worst_pixel, relative_error(std::abs((up - down) / 2e-4), sal.values[at]));
    }
  }
  return {worst_param <= 1e-4 && worst_pixel <= 1e-4,
          fmt("max relative error: parameters %.2g, pixels %.2g", worst_param, worst_pixel)};
}

Outcome a8_adam_first_step() {
  model::ModelMetadata meta;
  meta.backbone = model::BackboneKind::kFeatureFile;
  meta.raw_dim = 8;
  meta.selection = texture::FeatureSelection::all();
  auto m = model::FusionModel::initialize(meta, 3);
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-1, 1);
  model::TrainingSet data{8, 5, {}, {}, {}};
  for (int i = 0; i < 6; ++i) {
    for (int k = 0; k < 8; ++k) data.v1.push_back(u(gen));
    for (int k = 0; k < 5; ++k) data.v2.push_back(u(gen));
    data.labels.push_back(i % 3);
  }
  std::vector<double> grad(m.parameter_count());
  model::loss_and_gradient(m, data, {}, grad);
  const double lr = 1e-3;
  model::AdamConfig cfg;
  cfg.learning_rate = lr;
  model::Adam adam(m.parameter_count(), cfg);
  const std::vector<double> before(m.parameters().begin(), m.parameters().end());
  adam.step(m.parameters(), grad);
  double worst = 0;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (grad[i] == 0.0) continue;
    ++checked;
    const double step = std::abs(m.parameters()[i] - before[i]);
    // The epsilon term shrinks the step by eps / (|g| + eps).
    const double allowed = 1e-7 + cfg.epsilon / std::abs(grad[i]);
    worst = std::max(worst, std::abs(step / lr - 1.0) / allowed);
  }
  return {worst <= 1.0, fmt("%.0f parameters checked, worst error %.2g of tolerance", static_cast<double>(checked), worst)};
}

bool is_partition(const segmentation::SegmentMap& m) {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(m.count()), 0);
  for (const auto l : m.labels()) {
    if (l < 0 || l >= m.count()) return false;
    ++sizes[l];
  }
  for (auto s : sizes)
    if (s == 0) return false;
  return m.labels().size() == static_cast<std::size_t>(m.width()) * m.height();
}

Outcome a9_segmentation() {
  int partitions = 0;
  bool deterministic = true;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto img = burnsight::testing::random_image(24 + s % 7, 20 + s % 5, s);
    const auto q = segmentation::segment_quickshift(img);
    const auto f = segmentation::segment_felzenszwalb(img);
    partitions += is_partition(q) && is_partition(f);
    if (s < 10) deterministic = deterministic && q == segmentation::segment_quickshift(img) &&
                                f == segmentation::segment_felzenszwalb(img);
  }
  const int constant = segmentation::segment_felzenszwalb(GrayImage(40, 30, 0.6)).count();
  std::vector<double> px(16 * 12);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 16; ++x) px[y * 16 + x] = x < 8 ? 0.0 : 1.0;
  const GrayImage halves(16, 12, px);
  const int fz = segmentation::segment_felzenszwalb(halves, {0.01, 0.0, 1}).count();
  const int qs = segmentation::segment_quickshift(halves, {2.0, 4.0, 1000.0}).count();
  return {partitions == 100 && constant == 1 && fz == 2 && qs == 2 && deterministic,
          fmt("partitions %.0f/100, constant -> %.0f, ", partitions, constant) +
              fmt("half planes -> %.0f (felzenszwalb) %.0f (quickshift)", fz, qs) +
              (deterministic ? ", deterministic" : ", NOT deterministic")};
}

template <typename Fn>
std::optional<FormatErrorKind> format_error_kind(Fn&& fn) {
  try {
    fn();
  } catch (const FormatError& e) {
    return e.kind();
  }
  return std::nullopt;
}

Outcome a10_round_trips() {
  TempDir dir("bs-accept");
  model::ModelMetadata meta;
  meta.selection = texture::FeatureSelection::parse("asm,contrast");
  meta.v2_shift = {0.1, 0.2};
  meta.v2_scale = {1.5, 2.5};
  const auto m = model::FusionModel::initialize(meta, 1);
  model::save_checkpoint(m, dir / "m.ckpt");
  const auto bytes = burnsight::testing::file_bytes(dir / "m.ckpt");
  const auto back = model::load_checkpoint(dir / "m.ckpt");
  const bool ckpt_ok = back == m && model::encode_checkpoint(back) == bytes;

  model::FeatureMatrix fm{4, {}};
  std::mt19937_64 gen(2);
  std::normal_distribution<float> n;
  for (int i = 0; i < 40; ++i) fm.values.push_back(n(gen));
  model::save_fvec(fm, dir / "f.fvec");
  const auto fbytes = burnsight::testing::file_bytes(dir / "f.fvec");
  const auto fback = model::load_fvec(dir / "f.fvec");
  const bool fvec_ok = fback == fm && model::encode_fvec(fback) == fbytes;

  auto cut = bytes;
  cut.resize(cut.size() / 2);
  auto magic = bytes;
  magic[0] ^= 0xff;
  auto fcut = fbytes;
  fcut.pop_back();
  auto fmagic = fbytes;
  fmagic[0] ^= 0xff;
  const auto k1 = format_error_kind([&] { model::decode_checkpoint(cut); });
  const auto k2 = format_error_kind([&] { model::decode_checkpoint(magic); });
  const auto k3 = format_error_kind([&] { model::decode_fvec(fcut); });
  const auto k4 = format_error_kind([&] { model::decode_fvec(fmagic); });
  const bool rejected = k1 && k2 && k3 && k4 && *k1 != *k2 && *k3 != *k4 &&
                        *k2 == FormatErrorKind::kBadMagic && *k4 == FormatErrorKind::kBadMagic;
  std::string detail = std::string("checkpoint ") + (ckpt_ok ? "bitwise" : "MISMATCH") + ", fvec " +
                       (fvec_ok ? "bitwise" : "MISMATCH");
  if (k1 && k2 && k3 && k4) {
    detail += std::string(", errors ") + to_string(*k1) + "/" + to_string(*k2) + " and " + to_string(*k3) + "/" +
              to_string(*k4);
  }
  return {ckpt_ok && fvec_ok && rejected, detail};
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

Outcome a11_end_to_end() {
  TempDir dir("bs-accept");
  auto pass = [&](const std::string& tag) {
    const auto root = dir / tag;
    const auto manifest = (root / "data" / "manifest.csv").string();
    const auto ckpt = (root / "m.ckpt").string();
    int rc = cli({"synth", "--out", (root / "data").string(), "--per-class", "6", "--test-per-class", "2", "--seed",
                  "5"});
    rc |= cli({"train", "--manifest", manifest, "--glcm", "all", "--epochs", "3", "--lr", "1e-3", "--seed", "2",
               "--out", ckpt});
    rc |= cli({"eval", "--model", ckpt, "--manifest", manifest, "--report", (root / "report.json").string()});
    const auto image = imaging::load_manifest(manifest);
    rc |= cli({"explain", "--model", ckpt, "--image", image.resolve(image.entries.back()).string(), "--samples",
               "300", "--seed", "4", "--out", (root / "explain").string()});
    return rc;
  };
  const int rc = pass("a") | pass("b");
  const bool report_same = burnsight::testing::file_bytes(dir / "a" / "report.json") ==
                           burnsight::testing::file_bytes(dir / "b" / "report.json");
  const bool scores_same = burnsight::testing::file_bytes(dir / "a" / "explain" / "scores.json") ==
                           burnsight::testing::file_bytes(dir / "b" / "explain" / "scores.json");
  return {rc == 0 && report_same && scores_same,
          std::string("report.json ") + (report_same ? "identical" : "DIFFERS") + ", scores.json " +
              (scores_same ? "identical" : "DIFFERS") + (rc == 0 ? "" : ", a command failed")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"A1", a1_glcm_oracle},        {"A2", a2_fusion_improvement}, {"A3", a3_tukey_md},
      {"A4", a4_studentized_range},  {"A5", a5_pointing_game},      {"A6", a6_surrogate_recovery},
      {"A7", a7_gradients},          {"A8", a8_adam_first_step},    {"A9", a9_segmentation},
      {"A10", a10_round_trips},      {"A11", a11_end_to_end},
  };
  int failures = 0;
  for (const auto& [id, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %s %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
