#include "burnsight/svm.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "burnsight/error.hpp"
#include "burnsight/random.hpp"

namespace burnsight::model {

LinearSvm::LinearSvm(int num_classes, int dim)
    : num_classes_(num_classes),
      dim_(dim),
      weights_(static_cast<std::size_t>(num_classes) * dim, 0.0),
      bias_(static_cast<std::size_t>(num_classes), 0.0) {
  if (num_classes < 2 || dim < 1) throw UsageError("SVM needs >= 2 classes and dim >= 1");
}

std::span<double> LinearSvm::weights(int c) {
  return std::span<double>(weights_).subspan(static_cast<std::size_t>(c) * dim_, dim_);
}
std::span<const double> LinearSvm::weights(int c) const {
  return std::span<const double>(weights_).subspan(static_cast<std::size_t>(c) * dim_, dim_);
}

std::vector<double> LinearSvm::scores(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(dim_)) throw UsageError("SVM input dimension mismatch");
  std::vector<double> out(static_cast<std::size_t>(num_classes_));
  for (int c = 0; c < num_classes_; ++c) {
    const auto w = weights(c);
    out[c] = std::inner_product(w.begin(), w.end(), x.begin(), bias_[c]);
  }
  return out;
}

int LinearSvm::predict(std::span<const double> x) const {
  const auto s = scores(x);
  return static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
}

LinearSvm train_svm_baseline(std::span<const double> rows, int dim, std::span<const int> labels,
                             int num_classes, const SvmConfig& config) {
  if (dim < 1 || rows.size() != labels.size() * static_cast<std::size_t>(dim)) {
    throw UsageError("SVM feature rows do not match label count");
  }
  if (!(config.lambda > 0.0) || config.epochs < 1 || !(config.eta0 > 0.0)) {
    throw UsageError("invalid SVM configuration");
  }
  const std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) throw UsageError("SVM training needs at least two classes");
  for (const int l : labels) {
    if (l < 0 || l >= num_classes) throw UsageError("SVM label out of range");
  }

  LinearSvm svm(num_classes, dim);
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int c = 0; c < num_classes; ++c) {
    Rng rng(derive_seed(config.seed, 0x73766dULL, static_cast<std::uint64_t>(c)));
    auto w = svm.weights(c);
    double& b = svm.bias(c);
    long t = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      rng.shuffle(std::span<std::size_t>(order));
      for (const std::size_t i : order) {
        const double eta = config.eta0 / (1.0 + config.eta0 * config.lambda * static_cast<double>(t++));
        const auto x = rows.subspan(i * dim, static_cast<std::size_t>(dim));
        const double y = labels[i] == c ? 1.0 : -1.0;
        const double margin = y * std::inner_product(w.begin(), w.end(), x.begin(), b);
        const double shrink = 1.0 - eta * config.lambda;
        for (auto& wi : w) wi *= shrink;
        if (margin < 1.0) {
          for (int d = 0; d < dim; ++d) w[d] += eta * y * x[d];
          b += eta * y;
        }
      }
    }
  }
  return svm;
}

}  // namespace burnsight::model
