#include "dismet/types.hpp"

#include <cmath>

#include "dismet/errors.hpp"
#include "dismet/exact_sum.hpp"

namespace dismet {

PosteriorSet PosteriorSet::create(std::size_t n_samples, std::size_t n_latents,
                                  std::vector<double> means, std::vector<double> stds) {
  if (n_samples == 0 || n_latents == 0) {
    throw Error(ErrorCode::InvalidValue, "posterior set needs at least one sample and one latent");
  }
  if (means.size() != n_samples * n_latents || stds.size() != means.size()) {
    throw Error(ErrorCode::InvalidValue, "posterior buffers do not match the declared shape");
  }
  for (std::size_t idx = 0; idx < means.size(); ++idx) {
    if (!std::isfinite(means[idx])) {
      throw Error(ErrorCode::InvalidValue, "non-finite posterior mean at flat index " + std::to_string(idx));
    }
    if (!std::isfinite(stds[idx]) || stds[idx] <= 0.0) {
      throw Error(ErrorCode::InvalidValue, "posterior std must be finite and > 0 at flat index " + std::to_string(idx));
    }
  }
  PosteriorSet ps;
  ps.n_samples = n_samples;
  ps.n_latents = n_latents;
  ps.means = std::move(means);
  ps.stds = std::move(stds);
  return ps;
}

FactorTable FactorTable::create(std::size_t n_samples, std::size_t n_factors,
                                std::vector<std::int32_t> labels,
                                std::vector<std::int32_t> cardinalities) {
  if (n_samples == 0 || n_factors == 0) {
    throw Error(ErrorCode::InvalidValue, "factor table needs at least one sample and one factor");
  }
  if (labels.size() != n_samples * n_factors || cardinalities.size() != n_factors) {
    throw Error(ErrorCode::InvalidValue, "factor buffers do not match the declared shape");
  }
  for (std::size_t k = 0; k < n_factors; ++k) {
    if (cardinalities[k] < 1) {
      throw Error(ErrorCode::InvalidValue, "factor cardinality must be >= 1 (factor " + std::to_string(k) + ")");
    }
  }
  for (std::size_t n = 0; n < n_samples; ++n) {
    for (std::size_t k = 0; k < n_factors; ++k) {
      std::int32_t v = labels[n * n_factors + k];
      if (v < 0 || v >= cardinalities[k]) {
        throw Error(ErrorCode::LabelOutOfRange,
                    "label " + std::to_string(v) + " outside [0, " +
                        std::to_string(cardinalities[k]) + ") at row " + std::to_string(n) +
                        ", factor " + std::to_string(k));
      }
    }
  }
  FactorTable ft;
  ft.n_samples = n_samples;
  ft.n_factors = n_factors;
  ft.labels = std::move(labels);
  ft.cardinalities = std::move(cardinalities);
  ft.soft.assign(n_factors, std::nullopt);
  ft.quantized_from_continuous.assign(n_factors, false);
  return ft;
}

void FactorTable::attach_soft(std::size_t k, std::vector<double> rows) {
  if (k >= n_factors) {
    throw Error(ErrorCode::KOutOfRange, "soft labels for factor " + std::to_string(k) +
                                            " but table has " + std::to_string(n_factors));
  }
  std::size_t card = static_cast<std::size_t>(cardinalities[k]);
  if (rows.size() != n_samples * card) {
    throw Error(ErrorCode::InvalidValue, "soft label shape mismatch for factor " + std::to_string(k));
  }
  for (std::size_t n = 0; n < n_samples; ++n) {
    ExactSum row_sum;
    for (std::size_t c = 0; c < card; ++c) {
      double p = rows[n * card + c];
      if (!std::isfinite(p) || p < 0.0) {
        throw Error(ErrorCode::InvalidValue,
                    "soft label entries must be finite and >= 0 (row " + std::to_string(n) + ")");
      }
      row_sum.add(p);
    }
    if (std::fabs(row_sum.value() - 1.0) > 1e-9) {
      throw Error(ErrorCode::InvalidValue,
                  "soft label row " + std::to_string(n) + " does not sum to 1 within 1e-9");
    }
  }
  soft[k] = std::move(rows);
}

void QuantizationGrid::validate() const {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw Error(ErrorCode::DegenerateGrid, "grid range must be finite with lo < hi");
  }
  if (n_bins < 2) {
    throw Error(ErrorCode::DegenerateGrid, "grid needs at least two bins");
  }
}

std::size_t QuantizationGrid::clip_bin(double v) const {
  if (v <= lo) return 0;
  if (v >= hi) return n_bins - 1;
  double idx = (v - lo) / width();
  auto j = static_cast<std::size_t>(idx);
  return j >= n_bins ? n_bins - 1 : j;
}

void EvalConfig::validate() const {
  grid.validate();
  if (n_mc_samples == 0) {
    throw Error(ErrorCode::InvalidValue, "sample count must be >= 1");
  }
  if (factor_bins < 1) {
    throw Error(ErrorCode::InvalidValue, "factor bin count must be >= 1");
  }
}

std::vector<double> factor_distribution(const FactorTable& ft, std::size_t k) {
  if (k >= ft.n_factors) {
    throw Error(ErrorCode::KOutOfRange, "factor index " + std::to_string(k) + " out of range");
  }
  std::size_t card = static_cast<std::size_t>(ft.cardinalities[k]);
  std::vector<double> pmf(card, 0.0);
  if (ft.soft[k]) {
    const std::vector<double>& rows = *ft.soft[k];
    // Exact per-category sums keep the result independent of row order.
    for (std::size_t c = 0; c < card; ++c) {
      ExactSum acc;
      for (std::size_t n = 0; n < ft.n_samples; ++n) acc.add(rows[n * card + c]);
      pmf[c] = acc.value() / static_cast<double>(ft.n_samples);
    }
  } else {
    std::vector<std::size_t> counts(card, 0);
    for (std::size_t n = 0; n < ft.n_samples; ++n) {
      counts[static_cast<std::size_t>(ft.label(n, k))]++;
    }
    for (std::size_t c = 0; c < card; ++c) {
      pmf[c] = static_cast<double>(counts[c]) / static_cast<double>(ft.n_samples);
    }
  }
  return pmf;
}

double empirical_factor_entropy(const FactorTable& ft, std::size_t k) {
  std::vector<double> pmf = factor_distribution(ft, k);
  double h = 0.0;
  for (double p : pmf) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h < 0.0 ? 0.0 : h;
}

}  // namespace dismet
