#include "burnsight/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "burnsight/error.hpp"
#include "burnsight/fvec.hpp"
#include "burnsight/image_io.hpp"
#include "burnsight/parallel.hpp"
#include "burnsight/preprocess.hpp"
#include "json.hpp"

namespace burnsight::pipeline {
using imaging::GrayImage;
using model::BackboneKind;

std::vector<std::size_t> FeatureTable::indices(imaging::Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    if (splits[i] == split) out.push_back(i);
  }
  return out;
}

GrayImage load_model_input(const std::filesystem::path& path) { return imaging::preprocess(imaging::load_image(path)); }

FeatureTable extract_features(const imaging::DatasetManifest& manifest, const model::BackboneSource& backbone,
                              int glcm_levels) {
  const std::size_t n = manifest.entries.size();
  if (n == 0) throw UsageError("manifest has no entries");
  FeatureTable table;
  table.backbone = backbone.kind;
  table.glcm_levels = glcm_levels;
  table.raw_dim = backbone.kind == BackboneKind::kBuiltinPool ? model::kBuiltinDim : backbone.dim;
  table.v1.resize(n * table.raw_dim);
  table.glcm.resize(n);
  for (const auto& e : manifest.entries) {
    table.labels.push_back(static_cast<int>(e.label));
    table.splits.push_back(e.split);
  }

  if (backbone.kind == BackboneKind::kFeatureFile) {
    const auto features = model::load_fvec(backbone.path);
    if (features.count() != n) {
      throw UsageError("feature file has " + std::to_string(features.count()) + " rows but the manifest has " +
                       std::to_string(n));
    }
    std::copy(features.values.begin(), features.values.end(), table.v1.begin());
  }

  texture::GlcmConfig glcm_config;
  glcm_config.levels = glcm_levels;
  glcm_config.validate();
  parallel_for(n, [&](std::size_t i) {
    GrayImage img;
    try {
      img = load_model_input(manifest.resolve(manifest.entries[i]));
    } catch (const FormatError& e) {
      throw FormatError(e.kind(), "manifest row " + std::to_string(i) + ": " + e.detail());
    }
    if (backbone.kind == BackboneKind::kBuiltinPool) {
      const auto v1 = model::builtin_backbone(img);
      std::copy(v1.begin(), v1.end(), table.v1.begin() + static_cast<std::ptrdiff_t>(i * table.raw_dim));
    }
    table.glcm[i] = texture::haralick_features(texture::compute_glcm(texture::quantize(img, glcm_levels), glcm_config));
  });
  return table;
}

model::TrainingSet make_training_set(const FeatureTable& table, std::span<const std::size_t> rows,
                                     const texture::FeatureSelection& selection) {
  model::TrainingSet data;
  data.raw_dim = table.raw_dim;
  data.v2_dim = static_cast<int>(selection.size());
  for (const std::size_t r : rows) {
    if (r >= table.size()) throw UsageError("row index out of range");
    const auto first = table.v1.begin() + static_cast<std::ptrdiff_t>(r * table.raw_dim);
    data.v1.insert(data.v1.end(), first, first + table.raw_dim);
    const auto v2 = selection.select(table.glcm[r]);
    data.v2.insert(data.v2.end(), v2.begin(), v2.end());
    data.labels.push_back(table.labels[r]);
  }
  return data;
}

model::ModelMetadata make_metadata(const FeatureTable& table, const texture::FeatureSelection& selection) {
  model::ModelMetadata meta;
  meta.backbone = table.backbone;
  meta.raw_dim = table.raw_dim;
  meta.selection = selection;
  meta.glcm_levels = table.glcm_levels;
  meta.class_names.assign(imaging::kLabelNames.begin(), imaging::kLabelNames.end());
  return meta;
}

void check_compatible(const model::FusionModel& model, const FeatureTable& table) {
  const auto& meta = model.metadata();
  if (meta.backbone != table.backbone) {
    throw UsageError("model uses backbone '" + std::string(model::to_string(meta.backbone)) + "' but features come from '" +
                     std::string(model::to_string(table.backbone)) + "'");
  }
  if (meta.raw_dim != table.raw_dim) {
    throw UsageError("model expects backbone dimension " + std::to_string(meta.raw_dim) + ", features have " +
                     std::to_string(table.raw_dim));
  }
  if (meta.glcm_levels != table.glcm_levels) throw UsageError("model and features use different GLCM levels");
  const std::vector<std::string> expected(imaging::kLabelNames.begin(), imaging::kLabelNames.end());
  if (meta.class_names != expected) throw UsageError("model class set does not match the manifest labels");
}

std::vector<int> predict(const model::FusionModel& model, const model::TrainingSet& data) {
  std::vector<int> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i] = model::forward(model, data.v1_row(i), data.v2_row(i)).predicted_class;
  }
  return out;
}

evalstats::RunMetrics evaluate(const model::FusionModel& model, const FeatureTable& table,
                               std::span<const std::size_t> rows) {
  if (rows.empty()) throw UsageError("evaluation split is empty");
  check_compatible(model, table);
  const auto data = make_training_set(table, rows, model.metadata().selection);
  return evalstats::confusion_and_metrics(predict(model, data), data.labels, model::kOutputWidth);
}

namespace {

imaging::Split split_field(const nlohmann::json& j, const char* key, imaging::Split fallback) {
  if (!j.contains(key)) return fallback;
  const auto s = imaging::parse_split(j[key].get<std::string>());
  if (!s) throw UsageError(std::string("run spec: bad split in '") + key + "'");
  return *s;
}

}  // namespace

RunSpec RunSpec::parse(const std::string& json_text, const std::filesystem::path& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("run spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("run spec must be a JSON object");
  static const std::vector<std::string> known = {"manifest", "backbone", "selections", "seeds", "epochs",
                                                 "lr", "batch", "per_class_limit", "standardize",
                                                 "train_split", "eval_split"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw UsageError("run spec: unknown key '" + key + "'");
  }
  RunSpec spec;
  try {
    if (!j.contains("manifest")) throw UsageError("run spec needs 'manifest'");
    spec.manifest = j["manifest"].get<std::string>();
    if (spec.manifest.is_relative()) spec.manifest = base_dir / spec.manifest;
    if (j.contains("backbone")) {
      spec.backbone = j["backbone"].get<std::string>();
      constexpr std::string_view prefix = "fvec:";
      if (spec.backbone.starts_with(prefix)) {
        std::filesystem::path p = spec.backbone.substr(prefix.size());
        if (p.is_relative()) spec.backbone = std::string(prefix) + (base_dir / p).string();
      }
    }
    if (j.contains("selections")) spec.selections = j["selections"].get<std::vector<std::string>>();
    if (j.contains("seeds")) spec.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    spec.train.epochs = j.value("epochs", spec.train.epochs);
    spec.train.learning_rate = j.value("lr", spec.train.learning_rate);
    spec.train.batch_size = j.value("batch", spec.train.batch_size);
    spec.train.per_class_limit = j.value("per_class_limit", spec.train.per_class_limit);
    spec.train.standardize_v2 = j.value("standardize", spec.train.standardize_v2);
    spec.train_split = split_field(j, "train_split", spec.train_split);
    spec.eval_split = split_field(j, "eval_split", spec.eval_split);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("run spec has a field of the wrong type: ") + e.what());
  }
  spec.validate();
  return spec;
}

void RunSpec::validate() const {
  if (selections.empty()) throw UsageError("run spec lists no feature selections");
  for (const auto& s : selections) texture::FeatureSelection::parse(s);
  if (seeds.size() < 2) throw UsageError("run spec needs at least 2 seeds so the std column is defined");
  std::vector<std::uint64_t> sorted = seeds;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw UsageError("run spec seeds must be distinct");
  if (train_split == eval_split) throw UsageError("run spec trains and evaluates on the same split");
  train.validate();
}

std::vector<evalstats::MetricsReport> run_grid(const RunSpec& spec, const FeatureTable& table,
                                               const RunCallback& on_run) {
  spec.validate();
  const auto train_rows = table.indices(spec.train_split);
  const auto eval_rows = table.indices(spec.eval_split);
  if (train_rows.empty()) throw UsageError("training split is empty");
  if (eval_rows.empty()) throw UsageError("evaluation split is empty");

  std::vector<texture::FeatureSelection> selections;
  for (const auto& s : spec.selections) selections.push_back(texture::FeatureSelection::parse(s));
  const std::size_t n_seeds = spec.seeds.size();
  std::vector<evalstats::RunMetrics> results(selections.size() * n_seeds);
  parallel_for(results.size(), [&](std::size_t k) {
    const auto& selection = selections[k / n_seeds];
    model::TrainConfig config = spec.train;
    config.seed = spec.seeds[k % n_seeds];
    const auto data = make_training_set(table, train_rows, selection);
    const auto trained = model::train(data, make_metadata(table, selection), config);
    results[k] = evaluate(trained.model, table, eval_rows);
  });

  std::vector<evalstats::MetricsReport> reports;
  for (std::size_t s = 0; s < selections.size(); ++s) {
    evalstats::MetricsReport report;
    report.group = selections[s].name();
    report.class_names.assign(imaging::kLabelNames.begin(), imaging::kLabelNames.end());
    for (std::size_t i = 0; i < n_seeds; ++i) {
      report.runs.push_back({spec.seeds[i], results[s * n_seeds + i]});
      if (on_run) on_run(report.group, spec.seeds[i], results[s * n_seeds + i]);
    }
    std::sort(report.runs.begin(), report.runs.end(),
              [](const evalstats::RunRecord& a, const evalstats::RunRecord& b) { return a.seed < b.seed; });
    reports.push_back(std::move(report));
  }
  return reports;
}

namespace {

int parse_positive(std::string_view text, std::string_view spec) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || v < 1) {
    throw UsageError("bad segmenter '" + std::string(spec) + "' (expected quickshift|felzenszwalb|grid:RxC)");
  }
  return v;
}

std::pair<int, int> parse_grid(std::string_view spec) {
  const auto body = spec.substr(5);
  const auto x = body.find('x');
  if (x == std::string_view::npos) parse_positive("", spec);
  return {parse_positive(body.substr(0, x), spec), parse_positive(body.substr(x + 1), spec)};
}

}  // namespace

void validate_segmenter_spec(std::string_view spec) {
  if (spec == "quickshift" || spec == "felzenszwalb") return;
  if (spec.starts_with("grid:")) {
    parse_grid(spec);
    return;
  }
  throw UsageError("bad segmenter '" + std::string(spec) + "' (expected quickshift|felzenszwalb|grid:RxC)");
}

segmentation::SegmentMap run_segmenter(const GrayImage& img, std::string_view spec) {
  validate_segmenter_spec(spec);
  if (spec == "quickshift") return segmentation::segment_quickshift(img);
  if (spec == "felzenszwalb") return segmentation::segment_felzenszwalb(img);
  const auto [rows, cols] = parse_grid(spec);
  return segmentation::segment_grid(img, rows, cols);
}

explain::Classifier model_classifier(const model::FusionModel& model, std::optional<std::vector<double>> fixed_v1) {
  if (model.metadata().backbone == BackboneKind::kFeatureFile && !fixed_v1) {
    throw UsageError("feature-file models need a fixed backbone row to explain an image");
  }
  if (fixed_v1 && fixed_v1->size() != static_cast<std::size_t>(model.raw_dim())) {
    throw UsageError("fixed backbone row has the wrong dimension");
  }
  texture::GlcmConfig glcm_config;
  glcm_config.levels = model.metadata().glcm_levels;
  explain::Classifier c;
  c.concurrent = true;
  c.predict = [&model, glcm_config, fixed = std::move(fixed_v1)](const GrayImage& img) {
    const auto v2 = texture::texture_vector(img, glcm_config, model.metadata().selection);
    const auto p = fixed ? model::forward(model, *fixed, v2) : model::forward(model, model::builtin_backbone(img), v2);
    return std::vector<double>(p.probabilities.begin(), p.probabilities.end());
  };
  return c;
}

}  // namespace burnsight::pipeline
