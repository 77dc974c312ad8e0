#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairweight/data.hpp"

namespace fairweight {

/// One population in the synthetic generator. Within the group the score
/// feature is x ~ N(mean_shift, 1), sampled at stratified quantiles, and the
/// label is y = 1[x + noise > 0] with noise ~ N(0, noise_sd^2).
struct SynthGroup {
  std::string name;
  double share = 0.5;
  double mean_shift = 0.0;
  double noise_sd = 0.5;
};

struct SynthSpec {
  std::size_t n = 2000;
  std::vector<SynthGroup> groups;
  std::uint64_t seed = 0;
};

/// Columns: group (text), x, z (pure noise), one 0/1 indicator `g_<name>` per
/// non-first group, and label y. Group sizes are share * n, the last group
/// taking the rounding remainder.
Dataset generate_synthetic(const SynthSpec& spec);

/// Two groups "a" and "b" with shifts +s and -s chosen so the Bayes rule
/// 1[x > 0] has positive-rate gap Pr(h=1|a) - Pr(h=1|b) = sp_gap exactly.
SynthSpec planted_bias_spec(double sp_gap, std::size_t n, std::uint64_t seed,
                            double noise_a = 0.5, double noise_b = 0.5);

/// Pr(x > 0 | first) - Pr(x > 0 | second) under the generator's model.
double planted_sp_gap(const SynthGroup& first, const SynthGroup& second);

/// Standard normal CDF and its inverse.
double normal_cdf(double x);
double normal_quantile(double p);

}  // namespace fairweight
