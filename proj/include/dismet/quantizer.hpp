#pragma once

#include <cstddef>
#include <vector>

#include "dismet/types.hpp"

namespace dismet {

/// Mass function over grid bins or factor categories.
struct Pmf {
  std::vector<double> probs;
  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t j) const { return probs[j]; }
};

/// Joint mass table, row-major. Rows are latent bins; columns are latent
/// bins or factor categories depending on the producing operation.
struct JointPmf {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> probs;

  double at(std::size_t r, std::size_t c) const { return probs[r * cols + c]; }
  std::vector<double> row_marginal() const;
  std::vector<double> col_marginal() const;
};

/// Q(s_i | x): the Gaussian's mass in each grid bin, renormalized over the
/// grid so truncated tail mass is redistributed proportionally.
/// rectangle: density at bin centers times width, renormalized.
/// erf: exact integral over each bin via the error function, renormalized.
Pmf bin_posterior(double mu, double sigma, const QuantizationGrid& grid, BinMethod method,
                  ErfImpl erf_impl = ErfImpl::Precise);

/// All N bin vectors for latent i, row-major [N x B]. The building block the
/// aggregated tables below share.
std::vector<double> bin_posterior_rows(const PosteriorSet& ps, std::size_t i,
                                       const EvalConfig& cfg);

/// Q(s_i) = (1/N) sum_n Q(s_i | x^(n)).
Pmf marginal_latent_pmf(const PosteriorSet& ps, std::size_t i, const EvalConfig& cfg);

/// -sum p log p in nats, 0 log 0 = 0, probabilities floored at 1e-300
/// inside the log.
double pmf_entropy(const double* probs, std::size_t n);
double pmf_entropy(const Pmf& p);
double pmf_entropy(const std::vector<double>& p);
double pmf_entropy(const JointPmf& p);

/// (1/N) sum_n H(Q(s_i | x^(n))), order-independent in n.
double mean_conditional_bin_entropy(const PosteriorSet& ps, std::size_t i,
                                    const EvalConfig& cfg);

/// I_q(x, z_i) = H_q(z_i) - mean conditional bin entropy, clamped at 0.
double informativeness_quantized(const PosteriorSet& ps, std::size_t i, const EvalConfig& cfg);

/// Q(s_i, y_k) = (1/N) sum_n Q(s_i|x^(n)) p(y_k|x^(n)); hard labels act as
/// indicators, soft labels contribute their row distribution.
JointPmf joint_latent_factor_pmf(const PosteriorSet& ps, const FactorTable& ft,
                                 std::size_t i, std::size_t k, const EvalConfig& cfg);

/// Q(s_i, s_j) = (1/N) sum_n Q(s_i|x^(n)) Q(s_j|x^(n)) (latents independent
/// given x).
JointPmf joint_latent_pair_pmf(const PosteriorSet& ps, std::size_t i, std::size_t j,
                               const EvalConfig& cfg);

/// Point-mass joint of the posterior means: each sample adds 1/N to the 2-D
/// bin holding (mu_i, mu_j); out-of-range means clip to boundary bins.
JointPmf conditional_mean_joint_pmf(const PosteriorSet& ps, std::size_t i, std::size_t j,
                                    const EvalConfig& cfg);

/// Point-mass marginal of the posterior means for one latent.
Pmf conditional_mean_pmf(const PosteriorSet& ps, std::size_t i, const EvalConfig& cfg);

/// Point-mass joint of mean bins against factor labels (soft rows supported).
JointPmf conditional_mean_factor_pmf(const PosteriorSet& ps, const FactorTable& ft,
                                     std::size_t i, std::size_t k, const EvalConfig& cfg);

/// I from a joint table: H(rows) + H(cols) - H(joint), clamped at 0.
double mutual_information(const JointPmf& joint);

namespace detail {
// Shared accumulation helpers over a precomputed [n x b] row matrix; exact
// (order-independent) sums over n.
Pmf marginal_from_rows(const double* rows, std::size_t n, std::size_t b);
double mean_row_entropy(const double* rows, std::size_t n, std::size_t b);
JointPmf joint_factor_from_rows(const double* rows, std::size_t n, std::size_t b,
                                const FactorTable& ft, std::size_t k);
}  // namespace detail

}  // namespace dismet
