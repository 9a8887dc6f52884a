#include "burnsight/studentized_range.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>

#include "burnsight/error.hpp"

namespace burnsight::evalstats {

namespace {

using Gauss = boost::math::quadrature::gauss<double, 64>;

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kZLimit = 9.0;
constexpr int kInnerPieces = 6;
constexpr int kOuterPieces = 8;

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

// P(range of k iid N(0,1) <= w).
double range_cdf(double w, int k) {
  if (w <= 0.0) return 0.0;
  const double step = 2.0 * kZLimit / kInnerPieces;
  double total = 0.0;
  for (int p = 0; p < kInnerPieces; ++p) {
    const double a = -kZLimit + p * step;
    total += Gauss::integrate(
        [&](double z) {
          const double band = normal_cdf(z) - normal_cdf(z - w);
          if (band <= 0.0) return 0.0;
          return kInvSqrt2Pi * std::exp(-0.5 * z * z) * std::pow(band, k - 1);
        },
        a, a + step);
  }
  return std::clamp(k * total, 0.0, 1.0);
}

// Density of s = chi_df / sqrt(df).
double scale_log_density(double s, double df) {
  const double half = 0.5 * df;
  return half * std::log(df) - std::lgamma(half) - (half - 1.0) * std::log(2.0) + (df - 1.0) * std::log(s) -
         half * s * s;
}

}  // namespace

double studentized_range_cdf(double q, int k, double df) {
  if (k < 2) throw UsageError("studentized range needs k >= 2");
  if (!(df > 0.0)) throw UsageError("studentized range needs df > 0");
  if (std::isnan(q)) throw UsageError("studentized range quantile is NaN");
  if (q <= 0.0) return 0.0;
  if (std::isinf(q)) return 1.0;
  if (std::isinf(df)) return range_cdf(q, k);

  const double spread = 9.0 * std::sqrt(2.0 / df);
  const double lo = std::sqrt(std::max(0.0, 1.0 - spread));
  const double hi = std::sqrt(1.0 + spread + 40.0 / df);
  const double step = (hi - lo) / kOuterPieces;
  double total = 0.0;
  for (int p = 0; p < kOuterPieces; ++p) {
    const double a = lo + p * step;
    total += Gauss::integrate(
        [&](double s) {
          if (s <= 0.0) return 0.0;
          return std::exp(scale_log_density(s, df)) * range_cdf(q * s, k);
        },
        a, a + step);
  }
  return std::clamp(total, 0.0, 1.0);
}

double studentized_range_sf(double q, int k, double df) {
  return std::clamp(1.0 - studentized_range_cdf(q, k, df), 0.0, 1.0);
}

}  // namespace burnsight::evalstats
