#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dismet/types.hpp"

namespace dismet {

/// Emission rule for one latent of a synthetic world. A noise latent is
/// N(0,1) for every sample; otherwise mu holds one mean per combination of
/// the factors in depends_on (mixed-radix, last factor fastest).
struct LatentSpec {
  bool noise = false;
  std::vector<std::size_t> depends_on;  // sorted factor indices
  std::vector<double> mu;               // [prod of depended cardinalities]
  double sigma = 1.0;
};

/// Fully enumerable generative world: the dataset is the complete factor
/// grid with uniform weight, so every entropy and mutual information below
/// is a finite sum.
struct DiscreteWorld {
  std::string name;
  std::vector<std::int32_t> cardinalities;
  std::vector<LatentSpec> latents;
  std::uint64_t seed = 0;

  std::size_t n_factors() const { return cardinalities.size(); }
  std::size_t n_latents() const { return latents.size(); }
  std::size_t n_states() const;

  /// Throws TooLarge past the enumeration cap, InvalidValue on bad specs.
  void validate() const;

  PosteriorSet posteriors() const;
  FactorTable factors() const;
};

enum class WorldPreset {
  Perfect,
  RedundantPair,
  NoiseOnly,
  Entangled,
  Mixed,
  Smooth,
  Jittered,
};

/// "perfect", "redundant-pair", "noise-only", "entangled", "mixed",
/// "smooth", "jittered". Unknown names throw InvalidValue.
WorldPreset preset_from_name(const std::string& name);
std::string preset_name(WorldPreset preset);
const std::vector<std::string>& preset_names();

/// Deterministic world construction. cards, when non-empty, overrides the
/// preset's factor cardinalities (size must match the preset's factor count
/// except for presets generic in K).
DiscreteWorld build_world(WorldPreset preset, std::uint64_t seed);
DiscreteWorld build_world(WorldPreset preset, std::uint64_t seed,
                          const std::vector<std::int32_t>& cards);

/// Appends pure-noise latents in place.
void append_noise_latents(DiscreteWorld& world, std::size_t count);

/// Every metric of the library computed by exhaustive summation over the
/// world's factor grid: no Monte Carlo anywhere, bin masses from an
/// independent quadrature. Values mirror the MetricReport layout.
struct ExactTables {
  std::size_t n_latents = 0;
  std::size_t n_factors = 0;
  std::size_t n_states = 0;

  std::vector<double> factor_entropy;  // [K]

  std::vector<double> h_latent;          // [L], quantized marginal entropy
  std::vector<double> h_latent_given_x;  // [L]
  std::vector<double> informativeness;   // [L]
  std::vector<double> informativeness_normalized;

  std::vector<double> mi_full;             // [L x K]
  std::vector<double> joint_entropy_full;  // [L x K]
  std::vector<double> mi_cm;               // [L x K]
  std::vector<double> h_latent_cm;         // [L]

  std::vector<double> misjed_raw;  // [L x L]
  std::vector<double> misjed_normalized;

  std::vector<double> rmig_raw;  // [K]
  std::vector<double> rmig_normalized;
  std::vector<double> jemmig_raw;  // [K]
  std::vector<double> jemmig_normalized;
  double rmig_aggregate = 0.0;
  double rmig_normalized_aggregate = 0.0;
  double jemmig_aggregate = 0.0;
  double jemmig_normalized_aggregate = 0.0;

  bool modularity_defined = false;  // false when K = 1
  std::vector<double> modularity_full;  // [L]
  std::vector<bool> modularity_full_has_value;
  double modularity_full_average = 0.0;
  std::vector<double> modularity_cm;  // [L]
  std::vector<bool> modularity_cm_has_value;
  double modularity_cm_average = 0.0;

  // Exact counterparts of the sampled estimators; the quantization offsets
  // cancel inside every information difference, so these are the sampled
  // metrics' targets as well.
  std::vector<double> mi_single;  // [L], I(x, z_i)
  double total_information = 0.0;
  std::vector<double> sepin;  // [L]
  std::vector<double> indin;  // [L]
  std::vector<double> sepin_at;  // [L], index k-1 holds @k
  std::vector<double> indin_at;
  std::vector<double> rho;
  double wsepin = 0.0;
  double windin = 0.0;
  bool weights_defined = false;

  std::vector<double> corr_means;  // [L x L]
};

/// Grid, bin method, and factor handling come from cfg; Monte Carlo fields
/// are ignored. Throws TooLarge when a latent group's joint bin table would
/// exceed the enumeration cap.
ExactTables exact_metrics(const DiscreteWorld& world, const EvalConfig& cfg);

}  // namespace dismet
