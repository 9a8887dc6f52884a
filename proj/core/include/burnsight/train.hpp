#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "burnsight/fusion_model.hpp"

namespace burnsight::model {

struct TrainConfig {
  int epochs = 30;
  int batch_size = 8;
  double learning_rate = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  // Random per-class subsample of the training rows each run; 0 keeps all.
  int per_class_limit = 0;
  // Fit the v2 shift/scale to the training rows (z-scoring).
  bool standardize_v2 = true;

  void validate() const;
};

// Precomputed, frozen inputs: one v1 row and one v2 row per sample.
struct TrainingSet {
  int raw_dim = 0;
  int v2_dim = 0;
  std::vector<double> v1;  // size() x raw_dim
  std::vector<double> v2;  // size() x v2_dim
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> v1_row(std::size_t i) const {
    return std::span<const double>(v1).subspan(i * raw_dim, static_cast<std::size_t>(raw_dim));
  }
  std::span<const double> v2_row(std::size_t i) const {
    return std::span<const double>(v2).subspan(i * v2_dim, static_cast<std::size_t>(v2_dim));
  }
  void validate() const;
};

struct TrainResult {
  FusionModel model;
  std::vector<double> epoch_loss;  // mean cross-entropy per epoch
};

using EpochCallback = std::function<void(int epoch, double loss)>;

// Shuffled mini-batch cross-entropy training with Adam. The last partial
// batch is kept. Throws Error on a non-finite loss. `metadata` supplies the
// backbone kind, selection and raw dimension; its v2 normalization is
// replaced when standardize_v2 is set.
TrainResult train(const TrainingSet& data, ModelMetadata metadata, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

// Mean cross-entropy gradient over the given rows (all rows when empty).
double loss_and_gradient(const FusionModel& model, const TrainingSet& data,
                         std::span<const std::size_t> rows, std::span<double> grad);

}  // namespace burnsight::model
