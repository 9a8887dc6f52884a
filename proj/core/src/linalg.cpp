#include "burnsight/linalg.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "burnsight/error.hpp"

namespace burnsight::explain {

std::vector<double> solve_spd(std::vector<double> a, int n, std::vector<double> b) {
  const auto un = static_cast<std::size_t>(n);
  if (a.size() != un * un || b.size() != un) throw UsageError("solve_spd size mismatch");
  double max_diag = 0.0;
  for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a[i * un + i]));
  const double tolerance = 1e-13 * std::max(max_diag, 1e-300);

  // Lower-triangular factor overwrites a.
  for (int j = 0; j < n; ++j) {
    double d = a[j * un + j];
    for (int k = 0; k < j; ++k) d -= a[j * un + k] * a[j * un + k];
    if (!(d > tolerance)) {
      throw Error("singular normal equations (pivot " + std::to_string(j) + " = " + std::to_string(d) + ")");
    }
    d = std::sqrt(d);
    a[j * un + j] = d;
    for (int i = j + 1; i < n; ++i) {
      double s = a[i * un + j];
      for (int k = 0; k < j; ++k) s -= a[i * un + k] * a[j * un + k];
      a[i * un + j] = s / d;
    }
  }
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= a[i * un + k] * b[k];
    b[i] = s / a[i * un + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int k = i + 1; k < n; ++k) s -= a[k * un + i] * b[k];
    b[i] = s / a[i * un + i];
  }
  return b;
}

RidgeFit weighted_ridge(std::span<const double> design, int cols, std::span<const double> y,
                        std::span<const double> weights, double lambda, std::span<const int> columns) {
  const std::size_t rows = y.size();
  if (cols < 1 || design.size() != rows * static_cast<std::size_t>(cols) || weights.size() != rows) {
    throw UsageError("ridge regression input sizes disagree");
  }
  if (!(lambda >= 0.0)) throw UsageError("ridge lambda must be >= 0");
  std::vector<int> use;
  if (columns.empty()) {
    use.resize(static_cast<std::size_t>(cols));
    std::iota(use.begin(), use.end(), 0);
  } else {
    use.assign(columns.begin(), columns.end());
  }
  const std::size_t p = use.size();

  const double total_w = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total_w > 0.0)) throw UsageError("ridge weights must have a positive sum");

  std::vector<double> x_mean(p, 0.0);
  double y_mean = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = design.data() + i * cols;
    for (std::size_t j = 0; j < p; ++j) x_mean[j] += weights[i] * row[use[j]];
    y_mean += weights[i] * y[i];
  }
  for (auto& m : x_mean) m /= total_w;
  y_mean /= total_w;

  std::vector<double> gram(p * p, 0.0);
  std::vector<double> rhs(p, 0.0);
  std::vector<double> centered(p);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = design.data() + i * cols;
    const double w = weights[i];
    if (w == 0.0) continue;
    for (std::size_t j = 0; j < p; ++j) centered[j] = row[use[j]] - x_mean[j];
    const double yc = y[i] - y_mean;
    for (std::size_t j = 0; j < p; ++j) {
      const double wj = w * centered[j];
      rhs[j] += wj * yc;
      for (std::size_t k = 0; k <= j; ++k) gram[j * p + k] += wj * centered[k];
    }
  }
  for (std::size_t j = 0; j < p; ++j) {
    gram[j * p + j] += lambda;
    for (std::size_t k = 0; k < j; ++k) gram[k * p + j] = gram[j * p + k];
  }

  RidgeFit fit;
  fit.coefficients = solve_spd(std::move(gram), static_cast<int>(p), std::move(rhs));
  fit.intercept = y_mean;
  for (std::size_t j = 0; j < p; ++j) fit.intercept -= x_mean[j] * fit.coefficients[j];
  return fit;
}

}  // namespace burnsight::explain
