#pragma once

#include <cstdint>
#include <vector>

#include "dismet/types.hpp"

namespace dismet {

/// Non-empty set of latent indices, kept sorted and unique.
struct LatentSubset {
  std::vector<std::size_t> indices;

  static LatentSubset of(std::vector<std::size_t> idx);
  static LatentSubset all(std::size_t n_latents);
  static LatentSubset all_except(std::size_t n_latents, std::size_t i);

  std::size_t size() const { return indices.size(); }
};

/// Monte Carlo result. `raw` keeps the pre-clamp value for estimators with a
/// clamp-at-zero policy; elsewhere raw == value. Same inputs and seed always
/// reproduce the same numbers, bit for bit, regardless of thread schedule.
struct McEstimate {
  double value = 0.0;
  double raw = 0.0;
  std::size_t m_used = 0;
  std::uint64_t seed = 0;
};

struct LatentSample {
  std::size_t m = 0;
  std::size_t dim = 0;
  std::vector<double> values;        // row-major [m x dim]
  std::vector<std::size_t> sources;  // dataset row each draw came from
};

/// Draw m points from the aggregate posterior: source row uniform over the
/// dataset, then z_i ~ N(mu_i, sigma_i^2) per latent. The normal variate for
/// (draw, latent) is shared across every subset, giving common random
/// numbers to all subset estimators at the same seed.
LatentSample sample_latents(const PosteriorSet& ps, const LatentSubset& subset,
                            std::size_t m, std::uint64_t seed);

/// log[(1/N) sum_n prod_{i in subset} q(z_i | x^(n))], max-shifted.
double mixture_log_density(const PosteriorSet& ps, const LatentSubset& subset, const double* z);

/// H_s(z_subset) = -(1/M) sum_m log mixture(z^(m)). Can be negative for
/// sharp posteriors (differential entropy).
McEstimate entropy_sampled(const PosteriorSet& ps, const LatentSubset& subset,
                           const EvalConfig& cfg);

/// (1/N) sum_n sum_{i in subset} 0.5 log(2 pi e sigma^2), exact.
double conditional_entropy_given_x(const PosteriorSet& ps, const LatentSubset& subset);

/// I(x, z_subset) = H_s - H(.|x); clamped at 0, raw value kept.
McEstimate mi_x_subset(const PosteriorSet& ps, const LatentSubset& subset, const EvalConfig& cfg);

/// SEPIN component I(x, z_i | z_{!=i}) = I(x,z) - I(x,z_{!=i}), both terms
/// under one seed so the Monte Carlo noise cancels. Clamped at 0, raw kept.
/// With a single latent z_{!=i} is empty and the value falls back to I(x,z_i).
McEstimate sepin_component(const PosteriorSet& ps, std::size_t i, const EvalConfig& cfg);

/// INDIN component I(x,z_i) - I(z_i, z_{!=i}); signed, never clamped.
/// Same single-latent fallback as sepin_component.
McEstimate indin_component(const PosteriorSet& ps, std::size_t i, const EvalConfig& cfg);

}  // namespace dismet
