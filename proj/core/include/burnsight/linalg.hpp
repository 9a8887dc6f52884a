#pragma once

#include <span>
#include <vector>

namespace burnsight::explain {

// In-place Cholesky solve of the n x n symmetric positive-definite system
// a x = b. Throws Error when a pivot is not positive (singular system).
std::vector<double> solve_spd(std::vector<double> a, int n, std::vector<double> b);

struct RidgeFit {
  std::vector<double> coefficients;
  double intercept = 0.0;
};

// Weighted ridge regression with an unpenalized intercept:
//   min_b,c  sum_i w_i (y_i - c - x_i . b)^2 + lambda |b|^2
// `design` is rows x cols, row-major; only the listed columns are used when
// `columns` is non-empty (coefficients then follow that order).
RidgeFit weighted_ridge(std::span<const double> design, int cols, std::span<const double> y,
                        std::span<const double> weights, double lambda,
                        std::span<const int> columns = {});

}  // namespace burnsight::explain
