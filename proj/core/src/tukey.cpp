#include "burnsight/tukey.hpp"

#include <cmath>
#include <limits>

#include "burnsight/error.hpp"
#include "burnsight/studentized_range.hpp"

namespace burnsight::evalstats {

std::vector<TukeyPair> tukey_hsd(std::span<const TukeyGroup> groups, double alpha) {
  if (groups.size() < 2) throw UsageError("Tukey HSD needs at least 2 groups");
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must be in (0, 1)");
  const std::size_t n = groups.front().samples.size();
  if (n < 2) throw UsageError("Tukey HSD needs at least 2 samples per group");
  for (const auto& g : groups) {
    if (g.samples.size() != n) {
      throw UsageError("unequal group sizes: '" + groups.front().name + "' has " + std::to_string(n) + ", '" +
                       g.name + "' has " + std::to_string(g.samples.size()));
    }
  }

  const std::size_t k = groups.size();
  std::vector<double> means(k, 0.0);
  double ss = 0.0;
  for (std::size_t g = 0; g < k; ++g) {
    for (const double v : groups[g].samples) {
      if (!std::isfinite(v)) throw UsageError("non-finite sample in group '" + groups[g].name + "'");
      means[g] += v;
    }
    means[g] /= static_cast<double>(n);
    for (const double v : groups[g].samples) ss += (v - means[g]) * (v - means[g]);
  }
  const double df = static_cast<double>(k * n - k);
  const double mse = ss / df;
  const double se = std::sqrt(mse / static_cast<double>(n));

  std::vector<TukeyPair> out;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      TukeyPair p;
      p.group_i = groups[i].name;
      p.group_j = groups[j].name;
      p.mean_difference = means[j] - means[i];
      const double gap = std::abs(p.mean_difference);
      if (gap == 0.0) {
        p.q = 0.0;
      } else if (se == 0.0) {
        p.q = std::numeric_limits<double>::infinity();
      } else {
        p.q = gap / se;
      }
      p.p_adj = studentized_range_sf(p.q, static_cast<int>(k), df);
      p.reject = p.p_adj < alpha;
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace burnsight::evalstats
