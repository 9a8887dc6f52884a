#include "burnsight/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "burnsight/adam.hpp"
#include "burnsight/error.hpp"
#include "burnsight/random.hpp"

namespace burnsight::model {

void TrainConfig::validate() const {
  if (epochs < 1) throw UsageError("epochs must be >= 1");
  if (batch_size < 1) throw UsageError("batch size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw UsageError("learning rate must be > 0");
  if (per_class_limit < 0) throw UsageError("per-class limit must be >= 0");
}

void TrainingSet::validate() const {
  if (raw_dim < 1) throw UsageError("training set backbone dimension must be >= 1");
  if (v2_dim < 0) throw UsageError("negative texture dimension");
  if (v1.size() != size() * raw_dim || v2.size() != size() * v2_dim) {
    throw UsageError("training set arrays do not match its row count");
  }
  for (const int label : labels) {
    if (label < 0 || label >= kOutputWidth) throw UsageError("training label out of range");
  }
}

double loss_and_gradient(const FusionModel& model, const TrainingSet& data,
                         std::span<const std::size_t> rows, std::span<double> grad) {
  std::vector<std::size_t> all;
  if (rows.empty()) {
    all.resize(data.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    rows = all;
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  const double scale = 1.0 / static_cast<double>(rows.size());
  ForwardCache cache;
  double loss = 0.0;
  for (const std::size_t r : rows) {
    const Prediction p = forward(model, data.v1_row(r), data.v2_row(r), &cache);
    loss += cross_entropy(p, data.labels[r]);
    std::array<double, kOutputWidth> dlogits = p.probabilities;
    dlogits[data.labels[r]] -= 1.0;
    backward(model, data.v1_row(r), cache, dlogits, scale, grad);
  }
  return loss * scale;
}

namespace {

std::vector<std::size_t> pick_rows(const TrainingSet& data, const TrainConfig& config) {
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  if (config.per_class_limit == 0) return rows;

  Rng rng(derive_seed(config.seed, 0x73756273ULL));
  std::vector<std::size_t> picked;
  for (int c = 0; c < kOutputWidth; ++c) {
    std::vector<std::size_t> members;
    for (const auto r : rows) {
      if (data.labels[r] == c) members.push_back(r);
    }
    rng.shuffle(std::span<std::size_t>(members));
    members.resize(std::min(members.size(), static_cast<std::size_t>(config.per_class_limit)));
    picked.insert(picked.end(), members.begin(), members.end());
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

void fit_standardization(const TrainingSet& data, std::span<const std::size_t> rows,
                         ModelMetadata& metadata) {
  const int k = data.v2_dim;
  metadata.v2_shift.assign(static_cast<std::size_t>(k), 0.0);
  metadata.v2_scale.assign(static_cast<std::size_t>(k), 1.0);
  if (k == 0 || rows.empty()) return;
  const double n = static_cast<double>(rows.size());
  for (int i = 0; i < k; ++i) {
    double mean = 0.0;
    for (const auto r : rows) mean += data.v2_row(r)[i];
    mean /= n;
    double var = 0.0;
    for (const auto r : rows) {
      const double d = data.v2_row(r)[i] - mean;
      var += d * d;
    }
    const double sd = std::sqrt(var / n);
    metadata.v2_shift[i] = mean;
    metadata.v2_scale[i] = sd > 1e-12 ? sd : 1.0;
  }
}

}  // namespace

TrainResult train(const TrainingSet& data, ModelMetadata metadata, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  data.validate();
  if (data.size() == 0) throw UsageError("training set is empty");
  if (metadata.raw_dim != data.raw_dim || metadata.v2_dim() != data.v2_dim) {
    throw UsageError("model metadata does not match training set dimensions");
  }

  std::vector<std::size_t> order = pick_rows(data, config);
  if (config.standardize_v2) {
    fit_standardization(data, order, metadata);
  } else {
    metadata.v2_shift.clear();
    metadata.v2_scale.clear();
  }

  TrainResult result{FusionModel::initialize(std::move(metadata), config.seed), {}};
  FusionModel& model = result.model;
  Adam adam(model.parameter_count(),
            {config.learning_rate, config.beta1, config.beta2, config.epsilon});
  Rng shuffle_rng(derive_seed(config.seed, 0x73687566ULL));
  std::vector<double> grad(model.parameter_count());
  const auto batch = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const std::span<const std::size_t> rows(order.data() + start, end - start);
      const double loss = loss_and_gradient(model, data, rows, grad);
      if (!std::isfinite(loss)) {
        throw Error("non-finite loss at epoch " + std::to_string(epoch) + ", batch starting at " +
                    std::to_string(start));
      }
      total += loss * static_cast<double>(rows.size());
      adam.step(model.parameters(), grad);
    }
    const double epoch_loss = total / static_cast<double>(order.size());
    result.epoch_loss.push_back(epoch_loss);
    if (on_epoch) on_epoch(epoch, epoch_loss);
  }

  if (!model.all_finite()) throw Error("training produced non-finite weights");
  model.round_to_float32();
  return result;
}

}  // namespace burnsight::model
