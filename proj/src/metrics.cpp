#include "dismet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dismet/errors.hpp"
#include "dismet/exact_sum.hpp"
#include "dismet/parallel.hpp"
#include "dismet/rng.hpp"

namespace dismet {

namespace {

void check_latent(const PosteriorSet& ps, std::size_t i) {
  if (i >= ps.n_latents) throw Error(ErrorCode::InvalidValue, "latent index out of range");
}

void check_same_n(const PosteriorSet& ps, const FactorTable& ft) {
  if (ps.n_samples != ft.n_samples)
    throw Error(ErrorCode::InvalidValue, "posterior and factor tables disagree on sample count");
}

// Index of the column maximum; earlier index wins ties.
std::size_t argmax_column(const MiMatrix& mi, std::size_t k, std::size_t skip) {
  std::size_t best = skip == 0 ? 1 : 0;
  for (std::size_t i = 0; i < mi.n_latents; ++i) {
    if (i == skip) continue;
    if (mi.at(i, k) > mi.at(best, k)) best = i;
  }
  return best;
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

constexpr double kZeroMiRow = 1e-9;
constexpr double kUninformativeTotal = 1e-6;

}  // namespace

MisjedResult misjed(const PosteriorSet& ps, std::size_t i, std::size_t j, const EvalConfig& cfg) {
  cfg.validate();
  check_latent(ps, i);
  check_latent(ps, j);
  if (i == j) throw Error(ErrorCode::InvalidValue, "misjed needs two distinct latents");
  double hi = pmf_entropy(marginal_latent_pmf(ps, i, cfg));
  double hj = pmf_entropy(marginal_latent_pmf(ps, j, cfg));
  double hij = pmf_entropy(conditional_mean_joint_pmf(ps, i, j, cfg));
  MisjedResult r;
  r.raw = std::max(0.0, hi + hj - hij);
  r.normalized = r.raw / (2.0 * std::log(static_cast<double>(cfg.grid.n_bins)));
  return r;
}

double sepin_at_k(const std::vector<double>& components, std::size_t k) {
  if (k < 1 || k > components.size())
    throw Error(ErrorCode::KOutOfRange, "k must be in [1, n_latents]");
  std::vector<std::size_t> order(components.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return components[a] > components[b];
  });
  ExactSum acc;
  for (std::size_t r = 0; r < k; ++r) acc.add(components[order[r]]);
  return acc.value() / static_cast<double>(k);
}

namespace {

// rho_i from per-latent informativeness; throws when everything is noise.
std::vector<double> informativeness_weights(const std::vector<double>& mi_single) {
  ExactSum total;
  for (double v : mi_single) total.add(v);
  double t = total.value();
  if (t <= kUninformativeTotal)
    throw Error(ErrorCode::AllLatentsUninformative,
                "all latents carry negligible information about the data");
  std::vector<double> rho(mi_single.size());
  for (std::size_t i = 0; i < mi_single.size(); ++i) rho[i] = mi_single[i] / t;
  return rho;
}

WeightedAggregate weighted_aggregate(const std::vector<double>& mi_single,
                                     const std::vector<double>& component_values) {
  WeightedAggregate agg;
  agg.weights = informativeness_weights(mi_single);
  ExactSum acc;
  for (std::size_t i = 0; i < component_values.size(); ++i)
    acc.add(agg.weights[i] * component_values[i]);
  agg.value = acc.value();
  return agg;
}

}  // namespace

WeightedAggregate wsepin(const PosteriorSet& ps, const EvalConfig& cfg) {
  cfg.validate();
  std::size_t L = ps.n_latents;
  std::vector<double> mi_single(L), comps(L);
  for (std::size_t i = 0; i < L; ++i) {
    mi_single[i] = mi_x_subset(ps, LatentSubset::of({i}), cfg).value;
    comps[i] = sepin_component(ps, i, cfg).value;
  }
  return weighted_aggregate(mi_single, comps);
}

WeightedAggregate windin(const PosteriorSet& ps, const EvalConfig& cfg) {
  cfg.validate();
  std::size_t L = ps.n_latents;
  std::vector<double> mi_single(L), comps(L);
  for (std::size_t i = 0; i < L; ++i) {
    mi_single[i] = mi_x_subset(ps, LatentSubset::of({i}), cfg).value;
    comps[i] = indin_component(ps, i, cfg).value;
  }
  return weighted_aggregate(mi_single, comps);
}

MiMatrix mi_matrix(const PosteriorSet& ps, const FactorTable& ft, const EvalConfig& cfg,
                   MiMode mode) {
  cfg.validate();
  check_same_n(ps, ft);
  MiMatrix mi;
  mi.n_latents = ps.n_latents;
  mi.n_factors = ft.n_factors;
  mi.mode = mode;
  mi.values.assign(mi.n_latents * mi.n_factors, 0.0);
  mi.joint_entropy.assign(mi.n_latents * mi.n_factors, 0.0);
  mi.latent_entropy.assign(mi.n_latents, 0.0);
  std::size_t b = cfg.grid.n_bins;
  parallel_for(mi.n_latents, [&](std::size_t i) {
    if (mode == MiMode::FullPosterior) {
      std::vector<double> rows = bin_posterior_rows(ps, i, cfg);
      mi.latent_entropy[i] =
          pmf_entropy(detail::marginal_from_rows(rows.data(), ps.n_samples, b));
      for (std::size_t k = 0; k < mi.n_factors; ++k) {
        JointPmf joint = detail::joint_factor_from_rows(rows.data(), ps.n_samples, b, ft, k);
        mi.values[i * mi.n_factors + k] = mutual_information(joint);
        mi.joint_entropy[i * mi.n_factors + k] = pmf_entropy(joint);
      }
    } else {
      mi.latent_entropy[i] = pmf_entropy(conditional_mean_pmf(ps, i, cfg));
      for (std::size_t k = 0; k < mi.n_factors; ++k) {
        JointPmf joint = conditional_mean_factor_pmf(ps, ft, i, k, cfg);
        mi.values[i * mi.n_factors + k] = mutual_information(joint);
        mi.joint_entropy[i * mi.n_factors + k] = pmf_entropy(joint);
      }
    }
  });
  return mi;
}

RmigResult rmig_from_matrix(const MiMatrix& mi, std::size_t k, double factor_entropy) {
  if (k >= mi.n_factors) throw Error(ErrorCode::KOutOfRange, "factor index out of range");
  if (mi.n_latents < 2)
    throw Error(ErrorCode::SingleLatent, "rmig needs at least two latents");
  RmigResult r;
  r.top_latent = argmax_column(mi, k, mi.n_latents);  // skip index out of range: no skip
  r.second_latent = argmax_column(mi, k, r.top_latent);
  r.raw = std::max(0.0, mi.at(r.top_latent, k) - mi.at(r.second_latent, k));
  r.factor_entropy = factor_entropy;
  if (factor_entropy <= 0.0) {
    r.zero_entropy_factor = true;
    r.normalized = 0.0;
  } else {
    r.normalized = clamp01(r.raw / factor_entropy);
  }
  return r;
}

JemmigResult jemmig_from_matrix(const MiMatrix& mi, std::size_t k, double factor_entropy,
                                double log_bins) {
  if (k >= mi.n_factors) throw Error(ErrorCode::KOutOfRange, "factor index out of range");
  if (mi.n_latents < 2)
    throw Error(ErrorCode::SingleLatent, "jemmig needs at least two latents");
  JemmigResult r;
  r.top_latent = argmax_column(mi, k, mi.n_latents);
  r.second_latent = argmax_column(mi, k, r.top_latent);
  double mi_top = mi.at(r.top_latent, k);
  double mi_second = mi.at(r.second_latent, k);
  double h_joint = mi.joint_entropy[r.top_latent * mi.n_factors + k];
  double h_latent = mi.latent_entropy[r.top_latent];
  r.raw = h_joint - mi_top + mi_second;
  r.normalized =
      clamp01((h_latent + factor_entropy - 2.0 * mi_top + mi_second) / (log_bins + factor_entropy));
  r.gap_joint = h_joint - mi_top;
  r.gap_latent = h_latent - mi_top;
  r.gap_factor = factor_entropy - mi_top;
  return r;
}

RmigResult rmig(const PosteriorSet& ps, const FactorTable& ft, std::size_t k,
                const EvalConfig& cfg) {
  MiMatrix mi = mi_matrix(ps, ft, cfg, MiMode::FullPosterior);
  return rmig_from_matrix(mi, k, empirical_factor_entropy(ft, k));
}

JemmigResult jemmig(const PosteriorSet& ps, const FactorTable& ft, std::size_t k,
                    const EvalConfig& cfg) {
  MiMatrix mi = mi_matrix(ps, ft, cfg, MiMode::FullPosterior);
  return jemmig_from_matrix(mi, k, empirical_factor_entropy(ft, k),
                            std::log(static_cast<double>(cfg.grid.n_bins)));
}

ModularityScores modularity(const MiMatrix& mi) {
  if (mi.n_factors < 2)
    throw Error(ErrorCode::SingleFactor, "modularity needs at least two factors");
  ModularityScores out;
  out.scores.assign(mi.n_latents, 0.0);
  out.defined.assign(mi.n_latents, false);
  ExactSum total;
  std::size_t n_defined = 0;
  for (std::size_t i = 0; i < mi.n_latents; ++i) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < mi.n_factors; ++k)
      if (mi.at(i, k) > mi.at(i, best)) best = k;
    double theta = mi.at(i, best);
    if (theta <= kZeroMiRow) continue;  // all-zero row: modularity undefined
    ExactSum off;
    for (std::size_t k = 0; k < mi.n_factors; ++k) {
      if (k == best) continue;
      off.add(mi.at(i, k) * mi.at(i, k));
    }
    double denom = theta * theta * static_cast<double>(mi.n_factors - 1);
    out.scores[i] = 1.0 - off.value() / denom;
    out.defined[i] = true;
    total.add(out.scores[i]);
    ++n_defined;
  }
  out.any_defined = n_defined > 0;
  out.average = out.any_defined ? total.value() / static_cast<double>(n_defined) : 0.0;
  return out;
}

namespace {

// Population Pearson correlation of the columns of data [n x l]; zero-variance
// columns are flagged and their correlations reported as 0.
void pearson(const double* data, std::size_t n, std::size_t l, std::vector<double>& corr,
             std::vector<bool>& zero_variance) {
  std::vector<double> mean(l), var(l);
  for (std::size_t i = 0; i < l; ++i) {
    ExactSum s;
    for (std::size_t r = 0; r < n; ++r) s.add(data[r * l + i]);
    mean[i] = s.value() / static_cast<double>(n);
  }
  zero_variance.assign(l, false);
  for (std::size_t i = 0; i < l; ++i) {
    ExactSum s;
    for (std::size_t r = 0; r < n; ++r) {
      double d = data[r * l + i] - mean[i];
      s.add(d * d);
    }
    var[i] = s.value() / static_cast<double>(n);
    if (var[i] <= 0.0) zero_variance[i] = true;
  }
  corr.assign(l * l, 0.0);
  for (std::size_t i = 0; i < l; ++i) {
    corr[i * l + i] = 1.0;
    for (std::size_t j = i + 1; j < l; ++j) {
      double c = 0.0;
      if (!zero_variance[i] && !zero_variance[j]) {
        ExactSum s;
        for (std::size_t r = 0; r < n; ++r)
          s.add((data[r * l + i] - mean[i]) * (data[r * l + j] - mean[j]));
        double cov = s.value() / static_cast<double>(n);
        c = cov / std::sqrt(var[i] * var[j]);
        c = std::min(1.0, std::max(-1.0, c));
      }
      corr[i * l + j] = c;
      corr[j * l + i] = c;
    }
  }
}

}  // namespace

CorrelationMatrices correlation_matrices(const PosteriorSet& ps, const EvalConfig& cfg) {
  cfg.validate();
  if (ps.n_latents < 2)
    throw Error(ErrorCode::SingleLatent, "correlation needs at least two latents");
  std::size_t n = ps.n_samples;
  std::size_t l = ps.n_latents;
  std::vector<double> draws(n * l);
  parallel_for(n, [&](std::size_t r) {
    for (std::size_t i = 0; i < l; ++i) {
      double u = rng::normal(cfg.rng_seed, rng::Stream::kCorrNormalA, rng::Stream::kCorrNormalB,
                             static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(i));
      draws[r * l + i] = ps.mean(r, i) + ps.stddev(r, i) * u;
    }
  });
  CorrelationMatrices out;
  out.n_latents = l;
  pearson(draws.data(), n, l, out.samples, out.samples_zero_variance);
  pearson(ps.means.data(), n, l, out.means, out.means_zero_variance);
  return out;
}

double aggregate_over_factors(const std::vector<double>& per_factor) {
  if (per_factor.empty()) throw Error(ErrorCode::EmptyFactors, "no factors to aggregate over");
  ExactSum s;
  for (double v : per_factor) s.add(v);
  return s.value() / static_cast<double>(per_factor.size());
}

MetricSelection MetricSelection::all() { return MetricSelection{}; }

MetricSelection MetricSelection::none() {
  MetricSelection s;
  s.informativeness = s.misjed = s.sepin = s.indin = false;
  s.rmig = s.jemmig = s.modularity = s.correlation = false;
  return s;
}

MetricSelection MetricSelection::from_csv(const std::string& list) {
  MetricSelection s = MetricSelection::none();
  std::size_t pos = 0;
  bool any = false;
  while (pos <= list.size()) {
    std::size_t comma = list.find(',', pos);
    if (comma == std::string::npos) comma = list.size();
    std::string name = list.substr(pos, comma - pos);
    std::size_t first = name.find_first_not_of(" \t");
    std::size_t last = name.find_last_not_of(" \t");
    name = first == std::string::npos ? std::string() : name.substr(first, last - first + 1);
    pos = comma + 1;
    if (name.empty()) continue;
    any = true;
    if (name == "all") return MetricSelection::all();
    if (name == "informativeness") s.informativeness = true;
    else if (name == "misjed") s.misjed = true;
    else if (name == "sepin") s.sepin = true;
    else if (name == "indin") s.indin = true;
    else if (name == "rmig") s.rmig = true;
    else if (name == "jemmig") s.jemmig = true;
    else if (name == "modularity") s.modularity = true;
    else if (name == "correlation") s.correlation = true;
    else throw Error(ErrorCode::InvalidValue, "unknown metric name: " + name);
  }
  if (!any) throw Error(ErrorCode::InvalidValue, "empty metric list");
  return s;
}

namespace {

constexpr const char* kNotSelected = "not selected";
constexpr const char* kMissingFactors = "missing factors";
constexpr const char* kSingleLatent = "single latent";
constexpr const char* kSingleFactor = "single factor";

void note(MetricReport& rep, const std::string& metric, const std::string& reason) {
  rep.skipped.emplace_back(metric, reason);
}

// Shared sampled pass: H_s(z), H_s(z_i), H_s(z_{!=i}) under one seed, then
// every sampled metric assembled from the same terms. Matches the standalone
// ops exactly because the per-(draw, latent) variates only depend on the seed.
struct SampledTerms {
  McEstimate total;                       // I(x, z)
  std::vector<McEstimate> mi_single;      // I(x, z_i)
  std::vector<McEstimate> sepin;          // I(x, z_i | z_{!=i})
  std::vector<McEstimate> indin;          // I(x, z_i) - I(z_i, z_{!=i})
};

SampledTerms sampled_terms(const PosteriorSet& ps, const EvalConfig& cfg) {
  std::size_t L = ps.n_latents;
  SampledTerms t;
  t.mi_single.resize(L);
  t.sepin.resize(L);
  t.indin.resize(L);
  if (L == 1) {
    t.total = mi_x_subset(ps, LatentSubset::of({0}), cfg);
    t.mi_single[0] = t.total;
    t.sepin[0] = t.total;
    t.indin[0] = t.total;
    return t;
  }
  LatentSubset all = LatentSubset::all(L);
  McEstimate h_all = entropy_sampled(ps, all, cfg);
  double cond_all = conditional_entropy_given_x(ps, all);
  t.total.raw = h_all.value - cond_all;
  t.total.value = std::max(0.0, t.total.raw);
  t.total.m_used = h_all.m_used;
  t.total.seed = cfg.rng_seed;
  std::vector<McEstimate> h_single(L), h_rest(L);
  for (std::size_t i = 0; i < L; ++i) {
    h_single[i] = entropy_sampled(ps, LatentSubset::of({i}), cfg);
    h_rest[i] = entropy_sampled(ps, LatentSubset::all_except(L, i), cfg);
  }
  for (std::size_t i = 0; i < L; ++i) {
    LatentSubset rest = LatentSubset::all_except(L, i);
    double cond_single = conditional_entropy_given_x(ps, LatentSubset::of({i}));
    double cond_rest = conditional_entropy_given_x(ps, rest);

    McEstimate& ms = t.mi_single[i];
    ms.raw = h_single[i].value - cond_single;
    ms.value = std::max(0.0, ms.raw);
    ms.m_used = h_single[i].m_used;
    ms.seed = cfg.rng_seed;

    McEstimate& sep = t.sepin[i];
    sep.raw = (h_all.value - cond_all) - (h_rest[i].value - cond_rest);
    sep.value = std::max(0.0, sep.raw);
    sep.m_used = h_all.m_used;
    sep.seed = cfg.rng_seed;

    double mi_pair = h_single[i].value + h_rest[i].value - h_all.value;
    McEstimate& ind = t.indin[i];
    ind.raw = ms.value - mi_pair;
    ind.value = ind.raw;
    ind.m_used = h_all.m_used;
    ind.seed = cfg.rng_seed;
  }
  return t;
}

}  // namespace

MetricReport compute_metric_report(const PosteriorSet& ps, const FactorTable* ft,
                                   const EvalConfig& cfg, const MetricSelection& selection) {
  cfg.validate();
  if (ft) check_same_n(ps, *ft);
  MetricReport rep;
  rep.config = cfg;
  rep.n_samples = ps.n_samples;
  rep.n_latents = ps.n_latents;
  rep.n_factors = ft ? ft->n_factors : 0;
  rep.has_factors = ft != nullptr;

  std::size_t L = ps.n_latents;
  std::size_t K = rep.n_factors;
  std::size_t B = cfg.grid.n_bins;
  double log_bins = std::log(static_cast<double>(B));

  if (ft) {
    rep.factor_entropies.resize(K);
    for (std::size_t k = 0; k < K; ++k) rep.factor_entropies[k] = empirical_factor_entropy(*ft, k);
  }

  bool need_factor_quant = ft && (selection.rmig || selection.jemmig || selection.modularity);
  bool need_quant = selection.informativeness || selection.misjed || need_factor_quant;

  std::vector<double> h_latent(L, 0.0);
  if (need_quant) {
    rep.informativeness.assign(L, 0.0);
    rep.informativeness_normalized.assign(L, 0.0);
    rep.latent_entropy.assign(L, 0.0);
    if (need_factor_quant) {
      rep.mi_full.n_latents = L;
      rep.mi_full.n_factors = K;
      rep.mi_full.mode = MiMode::FullPosterior;
      rep.mi_full.values.assign(L * K, 0.0);
      rep.mi_full.joint_entropy.assign(L * K, 0.0);
      rep.mi_full.latent_entropy.assign(L, 0.0);
    }
    parallel_for(L, [&](std::size_t i) {
      std::vector<double> rows = bin_posterior_rows(ps, i, cfg);
      Pmf marg = detail::marginal_from_rows(rows.data(), ps.n_samples, B);
      h_latent[i] = pmf_entropy(marg);
      double h_cond = detail::mean_row_entropy(rows.data(), ps.n_samples, B);
      rep.latent_entropy[i] = h_latent[i];
      rep.informativeness[i] = std::max(0.0, h_latent[i] - h_cond);
      rep.informativeness_normalized[i] = rep.informativeness[i] / log_bins;
      if (need_factor_quant) {
        rep.mi_full.latent_entropy[i] = h_latent[i];
        for (std::size_t k = 0; k < K; ++k) {
          JointPmf joint = detail::joint_factor_from_rows(rows.data(), ps.n_samples, B, *ft, k);
          rep.mi_full.values[i * K + k] = mutual_information(joint);
          rep.mi_full.joint_entropy[i * K + k] = pmf_entropy(joint);
        }
      }
    });
    rep.has_informativeness = selection.informativeness;
    if (!selection.informativeness) {
      rep.informativeness.clear();
      rep.informativeness_normalized.clear();
      rep.latent_entropy.clear();
    }
  }
  if (!selection.informativeness) note(rep, "informativeness", kNotSelected);

  // MISJED over all unordered pairs; diagonal stays 0.
  if (selection.misjed) {
    if (L < 2) {
      note(rep, "misjed", kSingleLatent);
    } else {
      rep.misjed_raw.assign(L * L, 0.0);
      rep.misjed_normalized.assign(L * L, 0.0);
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      pairs.reserve(L * (L - 1) / 2);
      for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = i + 1; j < L; ++j) pairs.emplace_back(i, j);
      parallel_for(pairs.size(), [&](std::size_t p) {
        auto [i, j] = pairs[p];
        double hij = pmf_entropy(conditional_mean_joint_pmf(ps, i, j, cfg));
        double raw = std::max(0.0, h_latent[i] + h_latent[j] - hij);
        double norm = raw / (2.0 * log_bins);
        rep.misjed_raw[i * L + j] = raw;
        rep.misjed_raw[j * L + i] = raw;
        rep.misjed_normalized[i * L + j] = norm;
        rep.misjed_normalized[j * L + i] = norm;
      });
      rep.has_misjed = true;
    }
  } else {
    note(rep, "misjed", kNotSelected);
  }

  // Sampled metrics share one Monte Carlo pass.
  if (selection.sepin || selection.indin) {
    SampledTerms terms = sampled_terms(ps, cfg);
    rep.informativeness_sampled = terms.mi_single;
    rep.total_information = terms.total;
    rep.has_sampled_informativeness = true;
    std::vector<double> mi_vals(L);
    for (std::size_t i = 0; i < L; ++i) mi_vals[i] = terms.mi_single[i].value;
    std::vector<double> rho;
    bool weights_defined = true;
    try {
      rho = informativeness_weights(mi_vals);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AllLatentsUninformative) throw;
      weights_defined = false;
    }
    if (selection.sepin) {
      rep.sepin_components = terms.sepin;
      rep.sepin_at.resize(L);
      std::vector<double> vals(L);
      for (std::size_t i = 0; i < L; ++i) vals[i] = terms.sepin[i].value;
      for (std::size_t k = 1; k <= L; ++k) rep.sepin_at[k - 1] = sepin_at_k(vals, k);
      rep.rho = rho;
      rep.wsepin_defined = weights_defined;
      if (weights_defined) {
        ExactSum acc;
        for (std::size_t i = 0; i < L; ++i) acc.add(rho[i] * vals[i]);
        rep.wsepin_value = acc.value();
      } else {
        note(rep, "wsepin", "all latents uninformative");
      }
      rep.has_sepin = true;
    } else {
      note(rep, "sepin_at_k", kNotSelected);
    }
    if (selection.indin) {
      rep.indin_components = terms.indin;
      rep.indin_at.resize(L);
      std::vector<double> vals(L);
      for (std::size_t i = 0; i < L; ++i) vals[i] = terms.indin[i].value;
      for (std::size_t k = 1; k <= L; ++k) rep.indin_at[k - 1] = sepin_at_k(vals, k);
      if (rep.rho.empty()) rep.rho = rho;
      rep.windin_defined = weights_defined;
      if (weights_defined) {
        ExactSum acc;
        for (std::size_t i = 0; i < L; ++i) acc.add(rho[i] * vals[i]);
        rep.windin_value = acc.value();
      } else {
        note(rep, "windin", "all latents uninformative");
      }
      rep.has_indin = true;
    } else {
      note(rep, "indin_at_k", kNotSelected);
    }
  } else {
    note(rep, "sepin_at_k", kNotSelected);
    note(rep, "indin_at_k", kNotSelected);
  }

  // Factor-dependent metrics.
  if (need_factor_quant) {
    rep.mi_cm = mi_matrix(ps, *ft, cfg, MiMode::ConditionalMean);
    rep.has_mi_matrices = true;
  }
  if (selection.rmig) {
    if (!ft) {
      note(rep, "rmig", kMissingFactors);
    } else if (L < 2) {
      note(rep, "rmig", kSingleLatent);
    } else {
      rep.rmig_per_factor.resize(K);
      std::vector<double> raw(K), norm(K);
      for (std::size_t k = 0; k < K; ++k) {
        rep.rmig_per_factor[k] = rmig_from_matrix(rep.mi_full, k, rep.factor_entropies[k]);
        raw[k] = rep.rmig_per_factor[k].raw;
        norm[k] = rep.rmig_per_factor[k].normalized;
      }
      rep.rmig_aggregate = aggregate_over_factors(raw);
      rep.rmig_normalized_aggregate = aggregate_over_factors(norm);
      rep.has_rmig = true;
    }
  } else {
    note(rep, "rmig", kNotSelected);
  }
  if (selection.jemmig) {
    if (!ft) {
      note(rep, "jemmig", kMissingFactors);
    } else if (L < 2) {
      note(rep, "jemmig", kSingleLatent);
    } else {
      rep.jemmig_per_factor.resize(K);
      std::vector<double> raw(K), norm(K);
      for (std::size_t k = 0; k < K; ++k) {
        rep.jemmig_per_factor[k] =
            jemmig_from_matrix(rep.mi_full, k, rep.factor_entropies[k], log_bins);
        raw[k] = rep.jemmig_per_factor[k].raw;
        norm[k] = rep.jemmig_per_factor[k].normalized;
      }
      rep.jemmig_aggregate = aggregate_over_factors(raw);
      rep.jemmig_normalized_aggregate = aggregate_over_factors(norm);
      rep.has_jemmig = true;
    }
  } else {
    note(rep, "jemmig", kNotSelected);
  }
  if (selection.modularity) {
    if (!ft) {
      note(rep, "modularity", kMissingFactors);
    } else if (K < 2) {
      note(rep, "modularity", kSingleFactor);
    } else {
      rep.modularity_full = modularity(rep.mi_full);
      rep.modularity_cm = modularity(rep.mi_cm);
      rep.has_modularity = true;
    }
  } else {
    note(rep, "modularity", kNotSelected);
  }

  if (selection.correlation) {
    if (L < 2) {
      note(rep, "correlation", kSingleLatent);
    } else {
      rep.correlations = correlation_matrices(ps, cfg);
      rep.has_correlation = true;
    }
  } else {
    note(rep, "correlation", kNotSelected);
  }

  return rep;
}

}  // namespace dismet
