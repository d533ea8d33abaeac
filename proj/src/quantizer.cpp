#include "dismet/quantizer.hpp"

#include <cmath>

#include "dismet/errors.hpp"
#include "dismet/exact_sum.hpp"
#include "dismet/kernels.hpp"
#include "dismet/parallel.hpp"
#include "dismet/special_functions.hpp"

namespace dismet {

namespace {

constexpr double kLogFloor = 1e-300;

double floored_log(double p) { return std::log(p < kLogFloor ? kLogFloor : p); }

void check_latent(const PosteriorSet& ps, std::size_t i) {
  if (i >= ps.n_latents) {
    throw Error(ErrorCode::InvalidValue, "latent index " + std::to_string(i) +
                                             " out of range for L=" + std::to_string(ps.n_latents));
  }
}

void check_factor(const FactorTable& ft, std::size_t k) {
  if (k >= ft.n_factors) {
    throw Error(ErrorCode::KOutOfRange, "factor index " + std::to_string(k) +
                                            " out of range for K=" + std::to_string(ft.n_factors));
  }
}

void check_same_n(const PosteriorSet& ps, const FactorTable& ft) {
  if (ps.n_samples != ft.n_samples) {
    throw Error(ErrorCode::InvalidValue, "posterior and factor tables disagree on sample count");
  }
}

// Writes the renormalized bin vector for one Gaussian into out[0..B).
void bin_posterior_into(double mu, double sigma, const QuantizationGrid& grid,
                        BinMethod method, ErfImpl erf_impl, double* out) {
  std::size_t b = grid.n_bins;
  if (method == BinMethod::Rectangle) {
    // Width and the Gaussian normalizer cancel in the renormalization, so
    // only the exponents matter.
    double max_e = 0.0;
    for (std::size_t j = 0; j < b; ++j) {
      double t = (grid.center(j) - mu) / sigma;
      double e = -0.5 * t * t;
      out[j] = e;
      if (j == 0 || e > max_e) max_e = e;
    }
    double total = 0.0;
    for (std::size_t j = 0; j < b; ++j) {
      out[j] = std::exp(out[j] - max_e);
      total += out[j];
    }
    for (std::size_t j = 0; j < b; ++j) out[j] /= total;
    return;
  }
  // erf method: differences of the CDF at bin edges.
  constexpr double inv_sqrt2 = 0.70710678118654752440084436210485;
  double scale = inv_sqrt2 / sigma;
  std::vector<double> cdf(b + 1);
  if (erf_impl == ErfImpl::Polynomial) {
    std::vector<double> args(b + 1);
    for (std::size_t j = 0; j <= b; ++j) args[j] = (grid.edge(j) - mu) * scale;
    erf_approx_batch(args.data(), cdf.data(), b + 1);
  } else {
    for (std::size_t j = 0; j <= b; ++j) cdf[j] = std::erf((grid.edge(j) - mu) * scale);
  }
  double total = 0.0;
  for (std::size_t j = 0; j < b; ++j) {
    double mass = 0.5 * (cdf[j + 1] - cdf[j]);
    if (mass < 0.0) mass = 0.0;  // polynomial wiggle in far tails
    out[j] = mass;
    total += mass;
  }
  if (total < kLogFloor) {
    // Entire mass beyond the grid: collapse to the nearest boundary bin.
    for (std::size_t j = 0; j < b; ++j) out[j] = 0.0;
    out[grid.clip_bin(mu)] = 1.0;
    return;
  }
  for (std::size_t j = 0; j < b; ++j) out[j] /= total;
}

}  // namespace

std::vector<double> JointPmf::row_marginal() const {
  std::vector<double> m(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += probs[r * cols + c];
    m[r] = s;
  }
  return m;
}

std::vector<double> JointPmf::col_marginal() const {
  std::vector<double> m(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m[c] += probs[r * cols + c];
  }
  return m;
}

Pmf bin_posterior(double mu, double sigma, const QuantizationGrid& grid, BinMethod method,
                  ErfImpl erf_impl) {
  grid.validate();
  if (!std::isfinite(mu) || !std::isfinite(sigma) || sigma <= 0.0) {
    throw Error(ErrorCode::InvalidValue, "bin_posterior requires finite mu and sigma > 0");
  }
  Pmf p;
  p.probs.resize(grid.n_bins);
  bin_posterior_into(mu, sigma, grid, method, erf_impl, p.probs.data());
  return p;
}

std::vector<double> bin_posterior_rows(const PosteriorSet& ps, std::size_t i,
                                       const EvalConfig& cfg) {
  cfg.validate();
  check_latent(ps, i);
  std::size_t b = cfg.grid.n_bins;
  std::vector<double> rows(ps.n_samples * b);
  parallel_for(ps.n_samples, [&](std::size_t n) {
    bin_posterior_into(ps.mean(n, i), ps.stddev(n, i), cfg.grid, cfg.bin_method, cfg.erf_impl,
                       rows.data() + n * b);
  });
  return rows;
}

namespace detail {

Pmf marginal_from_rows(const double* rows, std::size_t n, std::size_t b) {
  Pmf p;
  p.probs.resize(b);
  for (std::size_t j = 0; j < b; ++j) {
    ExactSum acc;
    for (std::size_t r = 0; r < n; ++r) acc.add(rows[r * b + j]);
    p.probs[j] = acc.value() / static_cast<double>(n);
  }
  return p;
}

double mean_row_entropy(const double* rows, std::size_t n, std::size_t b) {
  ExactSum acc;
  for (std::size_t r = 0; r < n; ++r) acc.add(pmf_entropy(rows + r * b, b));
  return acc.value() / static_cast<double>(n);
}

}  // namespace detail

Pmf marginal_latent_pmf(const PosteriorSet& ps, std::size_t i, const EvalConfig& cfg) {
  std::vector<double> rows = bin_posterior_rows(ps, i, cfg);
  return detail::marginal_from_rows(rows.data(), ps.n_samples, cfg.grid.n_bins);
}

double pmf_entropy(const double* probs, std::size_t n) {
  double h = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double p = probs[j];
    if (p > 0.0) h -= p * floored_log(p);
  }
  return h < 0.0 ? 0.0 : h;
}

double pmf_entropy(const Pmf& p) { return pmf_entropy(p.probs.data(), p.probs.size()); }
double pmf_entropy(const std::vector<double>& p) { return pmf_entropy(p.data(), p.size()); }
double pmf_entropy(const JointPmf& p) { return pmf_entropy(p.probs.data(), p.probs.size()); }

double mean_conditional_bin_entropy(const PosteriorSet& ps, std::size_t i,
                                    const EvalConfig& cfg) {
  std::vector<double> rows = bin_posterior_rows(ps, i, cfg);
  return detail::mean_row_entropy(rows.data(), ps.n_samples, cfg.grid.n_bins);
}

double informativeness_quantized(const PosteriorSet& ps, std::size_t i, const EvalConfig& cfg) {
  std::vector<double> rows = bin_posterior_rows(ps, i, cfg);
  std::size_t b = cfg.grid.n_bins;
  Pmf marginal = detail::marginal_from_rows(rows.data(), ps.n_samples, b);
  double mi = pmf_entropy(marginal) - detail::mean_row_entropy(rows.data(), ps.n_samples, b);
  return mi < 0.0 ? 0.0 : mi;
}

JointPmf detail::joint_factor_from_rows(const double* rows, std::size_t n, std::size_t b,
                                        const FactorTable& ft, std::size_t k) {
  std::size_t card = static_cast<std::size_t>(ft.cardinality(k));
  std::vector<ExactSum> cells(b * card);
  if (ft.soft[k]) {
    const std::vector<double>& soft = *ft.soft[k];
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t s = 0; s < b; ++s) {
        double q = rows[r * b + s];
        if (q == 0.0) continue;
        for (std::size_t c = 0; c < card; ++c) {
          double w = soft[r * card + c];
          if (w != 0.0) cells[s * card + c].add(q * w);
        }
      }
    }
  } else {
    for (std::size_t r = 0; r < n; ++r) {
      auto c = static_cast<std::size_t>(ft.label(r, k));
      for (std::size_t s = 0; s < b; ++s) cells[s * card + c].add(rows[r * b + s]);
    }
  }
  JointPmf joint;
  joint.rows = b;
  joint.cols = card;
  joint.probs.resize(b * card);
  for (std::size_t idx = 0; idx < joint.probs.size(); ++idx) {
    joint.probs[idx] = cells[idx].value() / static_cast<double>(n);
  }
  return joint;
}

JointPmf joint_latent_factor_pmf(const PosteriorSet& ps, const FactorTable& ft,
                                 std::size_t i, std::size_t k, const EvalConfig& cfg) {
  check_same_n(ps, ft);
  check_factor(ft, k);
  std::vector<double> rows = bin_posterior_rows(ps, i, cfg);
  return detail::joint_factor_from_rows(rows.data(), ps.n_samples, cfg.grid.n_bins, ft, k);
}

JointPmf joint_latent_pair_pmf(const PosteriorSet& ps, std::size_t i, std::size_t j,
                               const EvalConfig& cfg) {
  check_latent(ps, i);
  check_latent(ps, j);
  if (i == j) throw Error(ErrorCode::InvalidValue, "pair table needs two distinct latents");
  std::vector<double> rows_i = bin_posterior_rows(ps, i, cfg);
  std::vector<double> rows_j = bin_posterior_rows(ps, j, cfg);
  std::size_t b = cfg.grid.n_bins;
  std::vector<ExactSum> cells(b * b);
  for (std::size_t n = 0; n < ps.n_samples; ++n) {
    const double* ri = rows_i.data() + n * b;
    const double* rj = rows_j.data() + n * b;
    for (std::size_t a = 0; a < b; ++a) {
      if (ri[a] == 0.0) continue;
      for (std::size_t c = 0; c < b; ++c) {
        if (rj[c] != 0.0) cells[a * b + c].add(ri[a] * rj[c]);
      }
    }
  }
  JointPmf joint;
  joint.rows = b;
  joint.cols = b;
  joint.probs.resize(b * b);
  for (std::size_t idx = 0; idx < joint.probs.size(); ++idx) {
    joint.probs[idx] = cells[idx].value() / static_cast<double>(ps.n_samples);
  }
  return joint;
}

JointPmf conditional_mean_joint_pmf(const PosteriorSet& ps, std::size_t i, std::size_t j,
                                    const EvalConfig& cfg) {
  cfg.validate();
  check_latent(ps, i);
  check_latent(ps, j);
  if (i == j) throw Error(ErrorCode::InvalidValue, "pair table needs two distinct latents");
  std::size_t b = cfg.grid.n_bins;
  std::vector<std::size_t> counts(b * b, 0);
  for (std::size_t n = 0; n < ps.n_samples; ++n) {
    std::size_t bi = cfg.grid.clip_bin(ps.mean(n, i));
    std::size_t bj = cfg.grid.clip_bin(ps.mean(n, j));
    counts[bi * b + bj]++;
  }
  JointPmf joint;
  joint.rows = b;
  joint.cols = b;
  joint.probs.resize(b * b);
  for (std::size_t idx = 0; idx < counts.size(); ++idx) {
    joint.probs[idx] = static_cast<double>(counts[idx]) / static_cast<double>(ps.n_samples);
  }
  return joint;
}

Pmf conditional_mean_pmf(const PosteriorSet& ps, std::size_t i, const EvalConfig& cfg) {
  cfg.validate();
  check_latent(ps, i);
  std::size_t b = cfg.grid.n_bins;
  std::vector<std::size_t> counts(b, 0);
  for (std::size_t n = 0; n < ps.n_samples; ++n) counts[cfg.grid.clip_bin(ps.mean(n, i))]++;
  Pmf p;
  p.probs.resize(b);
  for (std::size_t j = 0; j < b; ++j) {
    p.probs[j] = static_cast<double>(counts[j]) / static_cast<double>(ps.n_samples);
  }
  return p;
}

JointPmf conditional_mean_factor_pmf(const PosteriorSet& ps, const FactorTable& ft,
                                     std::size_t i, std::size_t k, const EvalConfig& cfg) {
  cfg.validate();
  check_latent(ps, i);
  check_same_n(ps, ft);
  check_factor(ft, k);
  std::size_t b = cfg.grid.n_bins;
  std::size_t card = static_cast<std::size_t>(ft.cardinality(k));
  JointPmf joint;
  joint.rows = b;
  joint.cols = card;
  if (ft.soft[k]) {
    const std::vector<double>& soft = *ft.soft[k];
    std::vector<ExactSum> cells(b * card);
    for (std::size_t n = 0; n < ps.n_samples; ++n) {
      std::size_t bi = cfg.grid.clip_bin(ps.mean(n, i));
      for (std::size_t c = 0; c < card; ++c) {
        double w = soft[n * card + c];
        if (w != 0.0) cells[bi * card + c].add(w);
      }
    }
    joint.probs.resize(b * card);
    for (std::size_t idx = 0; idx < joint.probs.size(); ++idx) {
      joint.probs[idx] = cells[idx].value() / static_cast<double>(ps.n_samples);
    }
  } else {
    std::vector<std::size_t> counts(b * card, 0);
    for (std::size_t n = 0; n < ps.n_samples; ++n) {
      counts[cfg.grid.clip_bin(ps.mean(n, i)) * card + static_cast<std::size_t>(ft.label(n, k))]++;
    }
    joint.probs.resize(b * card);
    for (std::size_t idx = 0; idx < counts.size(); ++idx) {
      joint.probs[idx] = static_cast<double>(counts[idx]) / static_cast<double>(ps.n_samples);
    }
  }
  return joint;
}

double mutual_information(const JointPmf& joint) {
  double mi = pmf_entropy(joint.row_marginal()) + pmf_entropy(joint.col_marginal()) -
              pmf_entropy(joint);
  return mi < 0.0 ? 0.0 : mi;
}

}  // namespace dismet
