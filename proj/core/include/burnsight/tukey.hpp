#pragma once

#include <span>
#include <string>
#include <vector>

namespace burnsight::evalstats {

struct TukeyGroup {
  std::string name;
  std::vector<double> samples;
};

struct TukeyPair {
  std::string group_i;
  std::string group_j;
  double mean_difference = 0.0;  // mean(J) - mean(I)
  double q = 0.0;
  double p_adj = 1.0;
  bool reject = false;
};

// All unordered pairs (I before J in input order). Groups must have equal
// size n >= 2.
std::vector<TukeyPair> tukey_hsd(std::span<const TukeyGroup> groups, double alpha = 0.05);

}  // namespace burnsight::evalstats
