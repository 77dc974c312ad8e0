#include "fairweight/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fairweight/error.hpp"

namespace fairweight {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "normal quantile needs p in (0,1)");
  }
  double lo = -40.0;
  double hi = 40.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double planted_sp_gap(const SynthGroup& first, const SynthGroup& second) {
  return normal_cdf(first.mean_shift) - normal_cdf(second.mean_shift);
}

SynthSpec planted_bias_spec(double sp_gap, std::size_t n, std::uint64_t seed, double noise_a,
                            double noise_b) {
  if (!(sp_gap >= 0.0 && sp_gap < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "planted SP gap must lie in [0,1)");
  }
  const double shift = normal_quantile((1.0 + sp_gap) / 2.0);
  SynthSpec spec;
  spec.n = n;
  spec.seed = seed;
  spec.groups = {{"a", 0.5, shift, noise_a}, {"b", 0.5, -shift, noise_b}};
  return spec;
}

Dataset generate_synthetic(const SynthSpec& spec) {
  if (spec.groups.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "synthetic data needs at least two groups");
  }
  if (spec.n < spec.groups.size()) {
    throw Error(ErrorCode::InvalidArgument, "too few rows for the requested groups");
  }
  std::vector<std::size_t> sizes;
  std::size_t assigned = 0;
  for (std::size_t g = 0; g + 1 < spec.groups.size(); ++g) {
    const auto size = static_cast<std::size_t>(
        std::llround(spec.groups[g].share * static_cast<double>(spec.n)));
    sizes.push_back(size);
    assigned += size;
  }
  if (assigned >= spec.n) throw Error(ErrorCode::InvalidArgument, "group shares exceed 1");
  sizes.push_back(spec.n - assigned);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> standard(0.0, 1.0);

  std::vector<std::string> feature_names{"x", "z"};
  for (std::size_t g = 1; g < spec.groups.size(); ++g) {
    feature_names.push_back("g_" + spec.groups[g].name);
  }

  std::vector<Example> examples;
  examples.reserve(spec.n);
  for (std::size_t g = 0; g < spec.groups.size(); ++g) {
    const SynthGroup& group = spec.groups[g];
    if (!(group.noise_sd >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative noise sd");
    // Stratified quantiles keep the group's score distribution close to the
    // analytic one; their order is shuffled before labels are drawn.
    std::vector<double> scores(sizes[g]);
    for (std::size_t r = 0; r < sizes[g]; ++r) {
      scores[r] = group.mean_shift +
                  normal_quantile((static_cast<double>(r) + 0.5) / static_cast<double>(sizes[g]));
    }
    std::shuffle(scores.begin(), scores.end(), rng);
    for (double x : scores) {
      Example ex;
      const double noise = group.noise_sd * standard(rng);
      const double z = standard(rng);
      ex.label = x + noise > 0.0 ? 1 : 0;
      ex.features = {x, z};
      for (std::size_t h = 1; h < spec.groups.size(); ++h) ex.features.push_back(h == g ? 1.0 : 0.0);
      ex.raw_attributes["group"] = group.name;
      examples.push_back(std::move(ex));
    }
  }
  std::shuffle(examples.begin(), examples.end(), rng);

  std::vector<std::string> attributes{"group"};
  return Dataset(std::move(examples), std::move(feature_names), "y", std::move(attributes));
}

}  // namespace fairweight
