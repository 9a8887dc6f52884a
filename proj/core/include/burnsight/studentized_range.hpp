#pragma once

namespace burnsight::evalstats {

// CDF of the studentized range distribution for k groups and df degrees of
// freedom. df may be +infinity (range of k standard normals).
double studentized_range_cdf(double q, int k, double df);

// Upper tail 1 - F, clamped to [0, 1].
double studentized_range_sf(double q, int k, double df);

}  // namespace burnsight::evalstats
