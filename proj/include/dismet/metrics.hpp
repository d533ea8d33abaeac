#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dismet/quantizer.hpp"
#include "dismet/sampler.hpp"
#include "dismet/types.hpp"

namespace dismet {

enum class MiMode { FullPosterior, ConditionalMean };

/// I(z_i, y_k) for every latent-factor pair, plus the latent entropies the
/// bound checks and JEMMIG need. Entries are >= 0 and bounded by
/// min(H(z_i), H(y_k)) for the matching estimator.
struct MiMatrix {
  std::size_t n_latents = 0;
  std::size_t n_factors = 0;
  MiMode mode = MiMode::FullPosterior;
  std::vector<double> values;          // [L x K]
  std::vector<double> joint_entropy;   // [L x K], H(z_i, y_k)
  std::vector<double> latent_entropy;  // [L], estimator-matched H(z_i)

  double at(std::size_t i, std::size_t k) const { return values[i * n_factors + k]; }
};

struct MisjedResult {
  double raw = 0.0;         // H_q(z_i) + H_q(z_j) - H(mean_i, mean_j), clamped at 0
  double normalized = 0.0;  // raw / (2 log B)
};

struct RmigResult {
  double raw = 0.0;
  double normalized = 0.0;  // raw / H(y_k); defined as 0 when H(y_k) = 0
  std::size_t top_latent = 0;
  std::size_t second_latent = 0;
  double factor_entropy = 0.0;
  bool zero_entropy_factor = false;
};

struct JemmigResult {
  double raw = 0.0;         // H(z_i*, y_k) - I(z_i*, y_k) + I(z_j, y_k)
  double normalized = 0.0;  // in [0,1] for every bin count
  std::size_t top_latent = 0;
  std::size_t second_latent = 0;
  // The two syntactic forms of the full-interpretability condition lead to
  // different optimality gaps; all are reported, none adjudicated.
  double gap_joint = 0.0;   // H(z_i*, y_k) - I(z_i*, y_k)
  double gap_latent = 0.0;  // H(z_i*) - I(z_i*, y_k)
  double gap_factor = 0.0;  // H(y_k) - I(z_i*, y_k)
};

struct ModularityScores {
  std::vector<double> scores;  // per latent; meaningful only where defined
  std::vector<bool> defined;   // false for all-zero MI rows
  double average = 0.0;        // over defined latents
  bool any_defined = false;
};

struct CorrelationMatrices {
  std::size_t n_latents = 0;
  std::vector<double> samples;  // [L x L], Pearson of one draw per data point
  std::vector<double> means;    // [L x L], Pearson of conditional means
  std::vector<bool> samples_zero_variance;  // per latent
  std::vector<bool> means_zero_variance;
};

/// Informativeness-weighted aggregate (WSEPIN / WINDIN) with its weights.
struct WeightedAggregate {
  double value = 0.0;
  std::vector<double> weights;  // rho_i = I(x,z_i) / sum_j I(x,z_j)
};

MisjedResult misjed(const PosteriorSet& ps, std::size_t i, std::size_t j, const EvalConfig& cfg);

/// Mean of the k largest components; ties broken by lower latent index.
double sepin_at_k(const std::vector<double>& components, std::size_t k);

WeightedAggregate wsepin(const PosteriorSet& ps, const EvalConfig& cfg);
WeightedAggregate windin(const PosteriorSet& ps, const EvalConfig& cfg);

MiMatrix mi_matrix(const PosteriorSet& ps, const FactorTable& ft, const EvalConfig& cfg,
                   MiMode mode);

RmigResult rmig(const PosteriorSet& ps, const FactorTable& ft, std::size_t k,
                const EvalConfig& cfg);
JemmigResult jemmig(const PosteriorSet& ps, const FactorTable& ft, std::size_t k,
                    const EvalConfig& cfg);

/// Same selection logic applied to a precomputed matrix (the report path).
RmigResult rmig_from_matrix(const MiMatrix& mi, std::size_t k, double factor_entropy);
JemmigResult jemmig_from_matrix(const MiMatrix& mi, std::size_t k, double factor_entropy,
                                double log_bins);

ModularityScores modularity(const MiMatrix& mi);

CorrelationMatrices correlation_matrices(const PosteriorSet& ps, const EvalConfig& cfg);

/// Unweighted mean over factors; EmptyFactors when the list is empty.
double aggregate_over_factors(const std::vector<double>& per_factor);

struct MetricSelection {
  bool informativeness = true;
  bool misjed = true;
  bool sepin = true;
  bool indin = true;
  bool rmig = true;
  bool jemmig = true;
  bool modularity = true;
  bool correlation = true;

  static MetricSelection all();
  static MetricSelection none();
  /// Parses "rmig,jemmig,..." ("all" allowed); unknown names -> InvalidValue.
  static MetricSelection from_csv(const std::string& list);
};

/// Everything one evaluation run produces. Absent inputs or degenerate
/// shapes never silently drop a metric: each skipped metric carries a reason
/// in `skipped`.
struct MetricReport {
  EvalConfig config;
  std::size_t n_samples = 0;
  std::size_t n_latents = 0;
  std::size_t n_factors = 0;
  bool has_factors = false;

  // quantized, per latent
  std::vector<double> informativeness;
  std::vector<double> informativeness_normalized;
  std::vector<double> latent_entropy;
  bool has_informativeness = false;

  // sampled
  std::vector<McEstimate> informativeness_sampled;
  McEstimate total_information;
  bool has_sampled_informativeness = false;

  std::vector<double> misjed_raw;         // [L x L], diagonal 0
  std::vector<double> misjed_normalized;  // [L x L]
  bool has_misjed = false;

  std::vector<McEstimate> sepin_components;
  std::vector<double> sepin_at;  // index k-1 holds SEPIN@k
  double wsepin_value = 0.0;
  bool wsepin_defined = false;
  std::vector<double> rho;  // informativeness weights
  bool has_sepin = false;

  std::vector<McEstimate> indin_components;
  std::vector<double> indin_at;
  double windin_value = 0.0;
  bool windin_defined = false;
  bool has_indin = false;

  MiMatrix mi_full;
  MiMatrix mi_cm;
  bool has_mi_matrices = false;

  std::vector<RmigResult> rmig_per_factor;
  double rmig_aggregate = 0.0;
  double rmig_normalized_aggregate = 0.0;
  bool has_rmig = false;

  std::vector<JemmigResult> jemmig_per_factor;
  double jemmig_aggregate = 0.0;
  double jemmig_normalized_aggregate = 0.0;
  bool has_jemmig = false;

  ModularityScores modularity_full;
  ModularityScores modularity_cm;
  bool has_modularity = false;

  CorrelationMatrices correlations;
  bool has_correlation = false;

  std::vector<double> factor_entropies;

  std::vector<std::pair<std::string, std::string>> skipped;  // metric -> reason
};

MetricReport compute_metric_report(const PosteriorSet& ps, const FactorTable* ft,
                                   const EvalConfig& cfg, const MetricSelection& selection);

}  // namespace dismet
