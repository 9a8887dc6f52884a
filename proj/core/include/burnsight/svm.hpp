#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace burnsight::model {

struct SvmConfig {
  double lambda = 1e-4;  // L2 strength on the weights (bias unregularized)
  int epochs = 50;
  double eta0 = 0.1;     // step size eta_t = eta0 / (1 + eta0 * lambda * t)
  std::uint64_t seed = 0;
};

// One-vs-rest linear scorers; prediction is the argmax score, lowest class
// index on ties.
class LinearSvm {
 public:
  LinearSvm(int num_classes, int dim);

  int num_classes() const noexcept { return num_classes_; }
  int dim() const noexcept { return dim_; }
  std::vector<double> scores(std::span<const double> x) const;
  int predict(std::span<const double> x) const;

  std::span<double> weights(int c);
  std::span<const double> weights(int c) const;
  double& bias(int c) { return bias_[c]; }
  double bias(int c) const { return bias_[c]; }

 private:
  int num_classes_;
  int dim_;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

// Stochastic sub-gradient descent on the L2-regularized hinge loss, one
// binary problem per class. `rows` holds labels.size() rows of `dim` values.
// Throws UsageError when fewer than two classes are present.
LinearSvm train_svm_baseline(std::span<const double> rows, int dim, std::span<const int> labels,
                             int num_classes, const SvmConfig& config = {});

}  // namespace burnsight::model
