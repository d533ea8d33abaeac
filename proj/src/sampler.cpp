#include "dismet/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "dismet/errors.hpp"
#include "dismet/exact_sum.hpp"
#include "dismet/kernels.hpp"
#include "dismet/parallel.hpp"
#include "dismet/rng.hpp"

namespace dismet {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;
constexpr double kHalfLog2PiE = 1.4189385332046727417803297364056;

void check_subset(const PosteriorSet& ps, const LatentSubset& subset) {
  if (subset.indices.empty()) {
    throw Error(ErrorCode::InvalidValue, "latent subset must be non-empty");
  }
  for (std::size_t i : subset.indices) {
    if (i >= ps.n_latents) {
      throw Error(ErrorCode::InvalidValue, "subset index " + std::to_string(i) +
                                               " out of range for L=" + std::to_string(ps.n_latents));
    }
  }
}

// Column-major views of one latent across the dataset, precomputed for the
// per-draw kernel sweep.
struct Columns {
  std::vector<double> mu;
  std::vector<double> inv_sigma;
  std::vector<double> c0;  // -log sigma - 0.5 log 2pi
};

std::vector<Columns> prepare_columns(const PosteriorSet& ps, const LatentSubset& subset) {
  std::vector<Columns> cols(subset.size());
  for (std::size_t d = 0; d < subset.size(); ++d) {
    std::size_t i = subset.indices[d];
    Columns& c = cols[d];
    c.mu.resize(ps.n_samples);
    c.inv_sigma.resize(ps.n_samples);
    c.c0.resize(ps.n_samples);
    for (std::size_t n = 0; n < ps.n_samples; ++n) {
      double sigma = ps.stddev(n, i);
      c.mu[n] = ps.mean(n, i);
      c.inv_sigma[n] = 1.0 / sigma;
      c.c0[n] = -std::log(sigma) - kHalfLog2Pi;
    }
  }
  return cols;
}

// ell[n] = log prod_i q(z_i | x^(n)); the mixture log density follows by an
// exact max plus an order-independent sum of the shifted exponentials.
double log_mixture_from_columns(const std::vector<Columns>& cols, const double* z,
                                double* ell, std::size_t n) {
  std::fill(ell, ell + n, 0.0);
  const auto& kt = kernels::active();
  for (std::size_t d = 0; d < cols.size(); ++d) {
    kt.gauss_logpdf_accum(z[d], cols[d].mu.data(), cols[d].inv_sigma.data(),
                          cols[d].c0.data(), ell, n);
  }
  double shift = kt.max_reduce(ell, n);
  ExactSum acc;
  for (std::size_t r = 0; r < n; ++r) acc.add(std::exp(ell[r] - shift));
  return shift + std::log(acc.value()) - std::log(static_cast<double>(n));
}

}  // namespace

LatentSubset LatentSubset::of(std::vector<std::size_t> idx) {
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  if (idx.empty()) throw Error(ErrorCode::InvalidValue, "latent subset must be non-empty");
  LatentSubset s;
  s.indices = std::move(idx);
  return s;
}

LatentSubset LatentSubset::all(std::size_t n_latents) {
  LatentSubset s;
  s.indices.resize(n_latents);
  for (std::size_t i = 0; i < n_latents; ++i) s.indices[i] = i;
  if (s.indices.empty()) throw Error(ErrorCode::InvalidValue, "latent subset must be non-empty");
  return s;
}

LatentSubset LatentSubset::all_except(std::size_t n_latents, std::size_t i) {
  LatentSubset s;
  s.indices.reserve(n_latents > 0 ? n_latents - 1 : 0);
  for (std::size_t j = 0; j < n_latents; ++j) {
    if (j != i) s.indices.push_back(j);
  }
  if (s.indices.empty()) throw Error(ErrorCode::InvalidValue, "latent subset must be non-empty");
  return s;
}

LatentSample sample_latents(const PosteriorSet& ps, const LatentSubset& subset,
                            std::size_t m, std::uint64_t seed) {
  check_subset(ps, subset);
  if (m == 0) throw Error(ErrorCode::InvalidValue, "sample count must be >= 1");
  LatentSample out;
  out.m = m;
  out.dim = subset.size();
  out.values.resize(m * out.dim);
  out.sources.resize(m);
  for (std::size_t draw = 0; draw < m; ++draw) {
    std::size_t src = rng::source_index(seed, draw, ps.n_samples);
    out.sources[draw] = src;
    for (std::size_t d = 0; d < out.dim; ++d) {
      std::size_t i = subset.indices[d];
      out.values[draw * out.dim + d] =
          ps.mean(src, i) + ps.stddev(src, i) * rng::latent_normal(seed, draw, i);
    }
  }
  return out;
}

double mixture_log_density(const PosteriorSet& ps, const LatentSubset& subset, const double* z) {
  check_subset(ps, subset);
  std::vector<Columns> cols = prepare_columns(ps, subset);
  std::vector<double> ell(ps.n_samples);
  return log_mixture_from_columns(cols, z, ell.data(), ps.n_samples);
}

McEstimate entropy_sampled(const PosteriorSet& ps, const LatentSubset& subset,
                           const EvalConfig& cfg) {
  cfg.validate();
  check_subset(ps, subset);
  const std::size_t m_total = cfg.n_mc_samples;
  const std::size_t n = ps.n_samples;
  const std::size_t dim = subset.size();
  std::vector<Columns> cols = prepare_columns(ps, subset);

  std::vector<double> per_draw(m_total);
  std::size_t n_chunks = worker_count() * 8;
  if (n_chunks > m_total) n_chunks = m_total;
  if (n_chunks == 0) n_chunks = 1;
  std::size_t chunk = (m_total + n_chunks - 1) / n_chunks;
  parallel_for(n_chunks, [&](std::size_t c) {
    std::vector<double> ell(n);
    std::vector<double> z(dim);
    std::size_t begin = c * chunk;
    std::size_t end = std::min(begin + chunk, m_total);
    for (std::size_t draw = begin; draw < end; ++draw) {
      std::size_t src = rng::source_index(cfg.rng_seed, draw, n);
      for (std::size_t d = 0; d < dim; ++d) {
        std::size_t i = subset.indices[d];
        z[d] = ps.mean(src, i) + ps.stddev(src, i) * rng::latent_normal(cfg.rng_seed, draw, i);
      }
      per_draw[draw] = log_mixture_from_columns(cols, z.data(), ell.data(), n);
    }
  });

  ExactSum acc;
  for (std::size_t draw = 0; draw < m_total; ++draw) acc.add(per_draw[draw]);
  double h = -acc.value() / static_cast<double>(m_total);
  return McEstimate{h, h, m_total, cfg.rng_seed};
}

double conditional_entropy_given_x(const PosteriorSet& ps, const LatentSubset& subset) {
  check_subset(ps, subset);
  ExactSum acc;
  for (std::size_t n = 0; n < ps.n_samples; ++n) {
    for (std::size_t i : subset.indices) acc.add(std::log(ps.stddev(n, i)));
  }
  return kHalfLog2PiE * static_cast<double>(subset.size()) +
         acc.value() / static_cast<double>(ps.n_samples);
}

McEstimate mi_x_subset(const PosteriorSet& ps, const LatentSubset& subset, const EvalConfig& cfg) {
  McEstimate h = entropy_sampled(ps, subset, cfg);
  double raw = h.value - conditional_entropy_given_x(ps, subset);
  return McEstimate{raw < 0.0 ? 0.0 : raw, raw, h.m_used, h.seed};
}

McEstimate sepin_component(const PosteriorSet& ps, std::size_t i, const EvalConfig& cfg) {
  if (i >= ps.n_latents) {
    throw Error(ErrorCode::InvalidValue, "latent index out of range");
  }
  if (ps.n_latents == 1) {
    // z_{!=i} is empty; conditioning on nothing reduces to plain
    // informativeness.
    return mi_x_subset(ps, LatentSubset::of({i}), cfg);
  }
  McEstimate full = mi_x_subset(ps, LatentSubset::all(ps.n_latents), cfg);
  McEstimate rest = mi_x_subset(ps, LatentSubset::all_except(ps.n_latents, i), cfg);
  double raw = full.raw - rest.raw;
  return McEstimate{raw < 0.0 ? 0.0 : raw, raw, cfg.n_mc_samples, cfg.rng_seed};
}

McEstimate indin_component(const PosteriorSet& ps, std::size_t i, const EvalConfig& cfg) {
  if (i >= ps.n_latents) {
    throw Error(ErrorCode::InvalidValue, "latent index out of range");
  }
  if (ps.n_latents == 1) {
    return mi_x_subset(ps, LatentSubset::of({i}), cfg);
  }
  McEstimate mi_single = mi_x_subset(ps, LatentSubset::of({i}), cfg);
  double h_single = entropy_sampled(ps, LatentSubset::of({i}), cfg).value;
  double h_rest = entropy_sampled(ps, LatentSubset::all_except(ps.n_latents, i), cfg).value;
  double h_all = entropy_sampled(ps, LatentSubset::all(ps.n_latents), cfg).value;
  double mi_rest = h_single + h_rest - h_all;
  double v = mi_single.value - mi_rest;
  return McEstimate{v, v, cfg.n_mc_samples, cfg.rng_seed};
}

}  // namespace dismet
