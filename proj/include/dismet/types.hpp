#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dismet/special_functions.hpp"

namespace dismet {

/// Diagonal-Gaussian encoder posteriors for a dataset: one (mean, std) pair
/// per sample and latent dimension, both stored row-major [n_samples x n_latents].
struct PosteriorSet {
  std::size_t n_samples = 0;
  std::size_t n_latents = 0;
  std::vector<double> means;
  std::vector<double> stds;

  double mean(std::size_t n, std::size_t i) const { return means[n * n_latents + i]; }
  double stddev(std::size_t n, std::size_t i) const { return stds[n * n_latents + i]; }

  /// Validates shapes and values (finite means, finite positive stds).
  static PosteriorSet create(std::size_t n_samples, std::size_t n_latents,
                             std::vector<double> means, std::vector<double> stds);
};

/// Ground-truth generative factors. Hard labels are category indices in
/// [0, cardinality); a factor may also carry a soft row-stochastic
/// distribution per sample.
struct FactorTable {
  std::size_t n_samples = 0;
  std::size_t n_factors = 0;
  std::vector<std::int32_t> labels;          // row-major [n_samples x n_factors]
  std::vector<std::int32_t> cardinalities;   // one per factor
  std::vector<std::optional<std::vector<double>>> soft;  // per factor, [n_samples x card]
  std::vector<bool> quantized_from_continuous;           // set by the loader

  std::int32_t label(std::size_t n, std::size_t k) const { return labels[n * n_factors + k]; }
  std::int32_t cardinality(std::size_t k) const { return cardinalities[k]; }

  static FactorTable create(std::size_t n_samples, std::size_t n_factors,
                            std::vector<std::int32_t> labels,
                            std::vector<std::int32_t> cardinalities);

  /// Attach a soft distribution for factor k; rows must sum to 1 within 1e-9.
  void attach_soft(std::size_t k, std::vector<double> rows);
};

/// Uniform quantization grid over [lo, hi] with n_bins cells. Values outside
/// the range belong to the nearest boundary bin.
struct QuantizationGrid {
  double lo = -4.0;
  double hi = 4.0;
  std::size_t n_bins = 100;

  void validate() const;  // throws DegenerateGrid
  double width() const { return (hi - lo) / static_cast<double>(n_bins); }
  double edge(std::size_t j) const {
    return j == n_bins ? hi : lo + width() * static_cast<double>(j);
  }
  double center(std::size_t j) const {
    return lo + width() * (static_cast<double>(j) + 0.5);
  }
  std::size_t clip_bin(double v) const;
};

enum class BinMethod { Rectangle, Erf };

/// Everything an estimator run depends on. All entropies and mutual
/// informations are in nats.
struct EvalConfig {
  QuantizationGrid grid{};
  std::size_t n_mc_samples = 10000;
  std::uint64_t rng_seed = 0;
  BinMethod bin_method = BinMethod::Erf;
  ErfImpl erf_impl = ErfImpl::Precise;
  std::size_t factor_bins = 20;  // grid for continuous factor columns

  void validate() const;
};

/// Empirical distribution of factor k (soft rows averaged when present).
std::vector<double> factor_distribution(const FactorTable& ft, std::size_t k);

/// Entropy in nats of the empirical factor distribution.
double empirical_factor_entropy(const FactorTable& ft, std::size_t k);

}  // namespace dismet
