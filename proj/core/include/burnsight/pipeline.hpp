#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "burnsight/backbone.hpp"
#include "burnsight/fusion_model.hpp"
#include "burnsight/lime.hpp"
#include "burnsight/manifest.hpp"
#include "burnsight/metrics.hpp"
#include "burnsight/segmentation.hpp"
#include "burnsight/texture.hpp"
#include "burnsight/train.hpp"

namespace burnsight::pipeline {

// Frozen per-row inputs for a manifest: backbone vector plus all five
// Haralick features, so any selection can be assembled without recomputing.
struct FeatureTable {
  model::BackboneKind backbone = model::BackboneKind::kBuiltinPool;
  int raw_dim = 0;
  int glcm_levels = 32;
  std::vector<double> v1;  // size() x raw_dim
  std::vector<texture::GlcmFeatures> glcm;
  std::vector<int> labels;
  std::vector<imaging::Split> splits;

  std::size_t size() const { return labels.size(); }
  std::vector<std::size_t> indices(imaging::Split split) const;
};

imaging::GrayImage load_model_input(const std::filesystem::path& path);

// Loads and preprocesses every image (in parallel). Feature-file backbones
// take v1 from the FVEC rows, which must match the manifest row count.
FeatureTable extract_features(const imaging::DatasetManifest& manifest, const model::BackboneSource& backbone,
                              int glcm_levels = 32);

model::TrainingSet make_training_set(const FeatureTable& table, std::span<const std::size_t> rows,
                                     const texture::FeatureSelection& selection);

model::ModelMetadata make_metadata(const FeatureTable& table, const texture::FeatureSelection& selection);

// Throws UsageError when the checkpoint cannot consume the table.
void check_compatible(const model::FusionModel& model, const FeatureTable& table);

std::vector<int> predict(const model::FusionModel& model, const model::TrainingSet& data);

evalstats::RunMetrics evaluate(const model::FusionModel& model, const FeatureTable& table,
                               std::span<const std::size_t> rows);

// Grid of feature selections x seeds, each trained and evaluated once.
struct RunSpec {
  std::filesystem::path manifest;
  std::string backbone = "builtin";
  std::vector<std::string> selections = {"none", "all"};
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5};
  model::TrainConfig train;
  imaging::Split train_split = imaging::Split::kTrain;
  imaging::Split eval_split = imaging::Split::kTest;

  // JSON object; relative paths resolve against base_dir.
  static RunSpec parse(const std::string& json_text, const std::filesystem::path& base_dir);
  void validate() const;
};

using RunCallback = std::function<void(const std::string& group, std::uint64_t seed, const evalstats::RunMetrics&)>;

// One report per selection, in spec order. Runs execute in parallel; the
// output does not depend on the thread count.
std::vector<evalstats::MetricsReport> run_grid(const RunSpec& spec, const FeatureTable& table,
                                               const RunCallback& on_run = {});

// "quickshift", "felzenszwalb" or "grid:RxC".
segmentation::SegmentMap run_segmenter(const imaging::GrayImage& img, std::string_view spec);
void validate_segmenter_spec(std::string_view spec);

// Probabilities of the model on an image. When fixed_v1 is given it replaces
// the backbone output, so only the texture branch sees the perturbation.
explain::Classifier model_classifier(const model::FusionModel& model,
                                     std::optional<std::vector<double>> fixed_v1 = std::nullopt);

}  // namespace burnsight::pipeline
