#include "dismet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "dismet/errors.hpp"
#include "dismet/exact_sum.hpp"
#include "dismet/rng.hpp"

namespace dismet {

namespace {

constexpr std::size_t kEnumerationCap = 1000000;
constexpr double kLogFloor = 1e-300;
constexpr double kZeroMiRow = 1e-9;
constexpr double kUninformativeTotal = 1e-6;

double floored_log(double p) { return std::log(std::max(p, kLogFloor)); }

double entropy_of(const std::vector<double>& p) {
  ExactSum s;
  for (double v : p)
    if (v > 0.0) s.add(-v * floored_log(v));
  return std::max(0.0, s.value());
}

// Mean on the default evaluation grid's bin-center lattice: category v of a
// cardinality-c factor sits at center index 50 + 10 v - 5 (c - 1), which is
// symmetric about the grid midpoint and integral for every c.
double lattice_mean(std::int32_t v, std::int32_t card) {
  QuantizationGrid grid{};
  int idx = 50 + 10 * static_cast<int>(v) - 5 * (static_cast<int>(card) - 1);
  return grid.center(static_cast<std::size_t>(idx));
}

void check_lattice_card(std::int32_t card, std::int32_t max_card) {
  if (card < 1 || card > max_card)
    throw Error(ErrorCode::InvalidValue, "cardinality outside the mean lattice range");
}

double entangled_value(std::int32_t v, std::int32_t card) {
  return (static_cast<double>(v) - static_cast<double>(card - 1) / 2.0) * 1.2;
}

LatentSpec coding_spec(std::size_t k, std::int32_t card, double sigma) {
  check_lattice_card(card, 10);
  LatentSpec spec;
  spec.depends_on = {k};
  spec.sigma = sigma;
  spec.mu.resize(static_cast<std::size_t>(card));
  for (std::int32_t v = 0; v < card; ++v) spec.mu[static_cast<std::size_t>(v)] = lattice_mean(v, card);
  return spec;
}

LatentSpec noise_spec() {
  LatentSpec spec;
  spec.noise = true;
  spec.sigma = 1.0;
  return spec;
}

std::size_t dep_table_size(const DiscreteWorld& world, const std::vector<std::size_t>& deps) {
  std::size_t size = 1;
  for (std::size_t d : deps) size *= static_cast<std::size_t>(world.cardinalities[d]);
  return size;
}

// Enumerable product space over a sorted set of factor indices. Tuple index
// t decodes with the last listed factor fastest, matching the world's state
// order and every mu table.
struct TupleSpace {
  std::vector<std::size_t> factors;
  std::vector<std::int32_t> cards;
  std::size_t size = 1;
};

TupleSpace tuple_space(const DiscreteWorld& world, std::vector<std::size_t> factors) {
  TupleSpace space;
  space.factors = std::move(factors);
  for (std::size_t f : space.factors) {
    space.cards.push_back(world.cardinalities[f]);
    space.size *= static_cast<std::size_t>(world.cardinalities[f]);
  }
  return space;
}

std::vector<std::int32_t> decode_tuple(const TupleSpace& space, std::size_t t) {
  std::vector<std::int32_t> vals(space.factors.size());
  for (std::size_t p = space.factors.size(); p-- > 0;) {
    auto card = static_cast<std::size_t>(space.cards[p]);
    vals[p] = static_cast<std::int32_t>(t % card);
    t /= card;
  }
  return vals;
}

// Restricted tuple index of a latent's dependencies inside a containing
// space (deps must be a subset of space.factors).
std::size_t restricted_index(const TupleSpace& space, const std::vector<std::int32_t>& vals,
                             const DiscreteWorld& world, const std::vector<std::size_t>& deps) {
  std::size_t idx = 0;
  for (std::size_t d : deps) {
    std::size_t p = static_cast<std::size_t>(
        std::lower_bound(space.factors.begin(), space.factors.end(), d) - space.factors.begin());
    idx = idx * static_cast<std::size_t>(world.cardinalities[d]) + static_cast<std::size_t>(vals[p]);
  }
  return idx;
}

std::vector<std::size_t> union_factors(const std::vector<std::size_t>& a,
                                       const std::vector<std::size_t>& b) {
  std::vector<std::size_t> u;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
  return u;
}

double jitter_value(std::uint64_t seed, std::size_t tuple_index) {
  double u1 = rng::to_unit(rng::hash4(seed, rng::kGeneric, tuple_index, 1));
  double u2 = rng::to_unit(rng::hash4(seed, rng::kGeneric, tuple_index, 2));
  double n = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  return 0.6 * std::min(2.5, std::max(-2.5, n));
}

}  // namespace

std::size_t DiscreteWorld::n_states() const {
  std::size_t n = 1;
  for (std::int32_t c : cardinalities) {
    n *= static_cast<std::size_t>(c);
    if (n > kEnumerationCap) return n;  // callers gate on the cap
  }
  return n;
}

void DiscreteWorld::validate() const {
  if (cardinalities.empty()) throw Error(ErrorCode::EmptyFactors, "world has no factors");
  for (std::int32_t c : cardinalities)
    if (c < 1) throw Error(ErrorCode::InvalidValue, "factor cardinality must be >= 1");
  if (latents.empty()) throw Error(ErrorCode::InvalidValue, "world has no latents");
  if (n_states() > kEnumerationCap)
    throw Error(ErrorCode::TooLarge, "world state space exceeds the enumeration cap");
  for (const LatentSpec& spec : latents) {
    if (!(spec.sigma > 0.0) || !std::isfinite(spec.sigma))
      throw Error(ErrorCode::InvalidValue, "emission sigma must be positive");
    if (spec.noise) {
      if (!spec.depends_on.empty() || !spec.mu.empty())
        throw Error(ErrorCode::InvalidValue, "noise latents take no emission table");
      continue;
    }
    if (spec.depends_on.empty())
      throw Error(ErrorCode::InvalidValue, "coding latents need at least one factor");
    if (!std::is_sorted(spec.depends_on.begin(), spec.depends_on.end()) ||
        std::adjacent_find(spec.depends_on.begin(), spec.depends_on.end()) != spec.depends_on.end())
      throw Error(ErrorCode::InvalidValue, "depends_on must be sorted and unique");
    for (std::size_t d : spec.depends_on)
      if (d >= cardinalities.size())
        throw Error(ErrorCode::InvalidValue, "depends_on index out of range");
    if (spec.mu.size() != dep_table_size(*this, spec.depends_on))
      throw Error(ErrorCode::InvalidValue, "emission table size mismatch");
    for (double m : spec.mu)
      if (!std::isfinite(m)) throw Error(ErrorCode::InvalidValue, "emission mean must be finite");
  }
}

PosteriorSet DiscreteWorld::posteriors() const {
  validate();
  std::size_t n = n_states();
  std::size_t l = latents.size();
  TupleSpace space = tuple_space(*this, [&] {
    std::vector<std::size_t> all(cardinalities.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  }());
  std::vector<double> means(n * l), stds(n * l);
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<std::int32_t> vals = decode_tuple(space, t);
    for (std::size_t i = 0; i < l; ++i) {
      const LatentSpec& spec = latents[i];
      if (spec.noise) {
        means[t * l + i] = 0.0;
        stds[t * l + i] = 1.0;
      } else {
        means[t * l + i] = spec.mu[restricted_index(space, vals, *this, spec.depends_on)];
        stds[t * l + i] = spec.sigma;
      }
    }
  }
  return PosteriorSet::create(n, l, std::move(means), std::move(stds));
}

FactorTable DiscreteWorld::factors() const {
  validate();
  std::size_t n = n_states();
  std::size_t k = cardinalities.size();
  TupleSpace space = tuple_space(*this, [&] {
    std::vector<std::size_t> all(k);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  }());
  std::vector<std::int32_t> labels(n * k);
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<std::int32_t> vals = decode_tuple(space, t);
    for (std::size_t f = 0; f < k; ++f) labels[t * k + f] = vals[f];
  }
  return FactorTable::create(n, k, std::move(labels), cardinalities);
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "perfect", "redundant-pair", "noise-only", "entangled", "mixed", "smooth", "jittered"};
  return names;
}

std::string preset_name(WorldPreset preset) { return preset_names()[static_cast<std::size_t>(preset)]; }

WorldPreset preset_from_name(const std::string& name) {
  const auto& names = preset_names();
  for (std::size_t p = 0; p < names.size(); ++p)
    if (names[p] == name) return static_cast<WorldPreset>(p);
  throw Error(ErrorCode::InvalidValue, "unknown preset: " + name);
}

DiscreteWorld build_world(WorldPreset preset, std::uint64_t seed) {
  return build_world(preset, seed, {});
}

DiscreteWorld build_world(WorldPreset preset, std::uint64_t seed,
                          const std::vector<std::int32_t>& cards) {
  DiscreteWorld w;
  w.seed = seed;
  w.name = preset_name(preset);
  auto pick_cards = [&](std::vector<std::int32_t> defaults, bool fixed_k) {
    if (cards.empty()) return defaults;
    if (fixed_k && cards.size() != defaults.size())
      throw Error(ErrorCode::InvalidValue, "preset expects " + std::to_string(defaults.size()) +
                                               " factor cardinalities");
    return cards;
  };
  switch (preset) {
    case WorldPreset::Perfect: {
      w.cardinalities = pick_cards({2, 3, 4}, false);
      for (std::size_t k = 0; k < w.cardinalities.size(); ++k)
        w.latents.push_back(coding_spec(k, w.cardinalities[k], 0.01));
      w.latents.push_back(noise_spec());
      w.latents.push_back(noise_spec());
      break;
    }
    case WorldPreset::RedundantPair: {
      w.cardinalities = pick_cards({6, 5}, true);
      w.latents.push_back(coding_spec(0, w.cardinalities[0], 0.01));
      w.latents.push_back(coding_spec(0, w.cardinalities[0], 0.01));
      w.latents.push_back(coding_spec(1, w.cardinalities[1], 0.01));
      w.latents.push_back(noise_spec());
      break;
    }
    case WorldPreset::NoiseOnly: {
      w.cardinalities = pick_cards({4, 4}, false);
      for (int i = 0; i < 4; ++i) w.latents.push_back(noise_spec());
      break;
    }
    case WorldPreset::Entangled: {
      w.cardinalities = pick_cards({4, 4}, true);
      check_lattice_card(w.cardinalities[0], 4);
      check_lattice_card(w.cardinalities[1], 4);
      std::size_t c0 = static_cast<std::size_t>(w.cardinalities[0]);
      std::size_t c1 = static_cast<std::size_t>(w.cardinalities[1]);
      const double inv_sqrt2 = 0.70710678118654752440084436210485;
      LatentSpec z0, z1;
      z0.depends_on = {0, 1};
      z1.depends_on = {0, 1};
      z0.sigma = z1.sigma = 0.05;
      z0.mu.resize(c0 * c1);
      z1.mu.resize(c0 * c1);
      for (std::size_t v0 = 0; v0 < c0; ++v0) {
        for (std::size_t v1 = 0; v1 < c1; ++v1) {
          double u0 = entangled_value(static_cast<std::int32_t>(v0), w.cardinalities[0]);
          double u1 = entangled_value(static_cast<std::int32_t>(v1), w.cardinalities[1]);
          z0.mu[v0 * c1 + v1] = (u0 + u1) * inv_sqrt2;
          z1.mu[v0 * c1 + v1] = (u1 - u0) * inv_sqrt2;
        }
      }
      w.latents.push_back(std::move(z0));
      w.latents.push_back(std::move(z1));
      w.latents.push_back(noise_spec());
      break;
    }
    case WorldPreset::Mixed: {
      w.cardinalities = pick_cards({6, 6}, true);
      w.latents.push_back(coding_spec(0, w.cardinalities[0], 0.02));
      w.latents.push_back(coding_spec(1, w.cardinalities[1], 0.02));
      for (int i = 0; i < 3; ++i) w.latents.push_back(noise_spec());
      break;
    }
    case WorldPreset::Smooth: {
      w.cardinalities = pick_cards({6, 6}, true);
      w.latents.push_back(coding_spec(0, w.cardinalities[0], 0.5));
      w.latents.push_back(coding_spec(1, w.cardinalities[1], 0.5));
      w.latents.push_back(noise_spec());
      break;
    }
    case WorldPreset::Jittered: {
      w.cardinalities = pick_cards({6, 6}, true);
      std::size_t states =
          static_cast<std::size_t>(w.cardinalities[0]) * static_cast<std::size_t>(w.cardinalities[1]);
      const double scale[3] = {1.0, 0.9, 1.1};
      for (int i = 0; i < 3; ++i) {
        LatentSpec spec;
        spec.depends_on = {0, 1};
        spec.sigma = 1.0;
        spec.mu.resize(states);
        for (std::size_t t = 0; t < states; ++t) spec.mu[t] = scale[i] * jitter_value(seed, t);
        w.latents.push_back(std::move(spec));
      }
      break;
    }
  }
  w.validate();
  return w;
}

void append_noise_latents(DiscreteWorld& world, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) world.latents.push_back(noise_spec());
}

namespace {

// ---- independent quantization --------------------------------------------
// Bin masses recomputed from scratch: rectangle from center densities, erf
// from composite Gauss-Legendre integration of the density (no erf calls).

constexpr int kGlNodes = 8;  // 16-point rule stored as +/- pairs
constexpr double kGlX[kGlNodes] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr double kGlW[kGlNodes] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

double gauss_density(double x, double mu, double sigma) {
  double t = (x - mu) / sigma;
  return std::exp(-0.5 * t * t) / (sigma * 2.5066282746310005024157652848110);
}

double integrate_density(double a, double b, double mu, double sigma) {
  int panels = static_cast<int>(std::ceil((b - a) / sigma));
  panels = std::min(std::max(panels, 1), 128);
  double pw = (b - a) / panels;
  ExactSum s;
  for (int p = 0; p < panels; ++p) {
    double mid = a + pw * (p + 0.5);
    double half = pw * 0.5;
    for (int g = 0; g < kGlNodes; ++g) {
      double dx = half * kGlX[g];
      s.add(kGlW[g] * half * gauss_density(mid - dx, mu, sigma));
      s.add(kGlW[g] * half * gauss_density(mid + dx, mu, sigma));
    }
  }
  return s.value();
}

std::size_t clip_bin_index(double v, const QuantizationGrid& grid) {
  double w = (grid.hi - grid.lo) / static_cast<double>(grid.n_bins);
  if (v <= grid.lo) return 0;
  if (v >= grid.hi) return grid.n_bins - 1;
  auto j = static_cast<std::size_t>((v - grid.lo) / w);
  return std::min(j, grid.n_bins - 1);
}

std::vector<double> oracle_bin_masses(double mu, double sigma, const EvalConfig& cfg) {
  const QuantizationGrid& grid = cfg.grid;
  std::size_t b = grid.n_bins;
  double w = (grid.hi - grid.lo) / static_cast<double>(b);
  std::vector<double> mass(b);
  if (cfg.bin_method == BinMethod::Rectangle) {
    // density at centers, softmax-normalized so far tails cannot underflow
    // the whole vector
    std::vector<double> expo(b);
    double emax = -1e300;
    for (std::size_t j = 0; j < b; ++j) {
      double c = grid.lo + w * (static_cast<double>(j) + 0.5);
      double t = (c - mu) / sigma;
      expo[j] = -0.5 * t * t;
      emax = std::max(emax, expo[j]);
    }
    ExactSum total;
    for (std::size_t j = 0; j < b; ++j) {
      mass[j] = std::exp(expo[j] - emax);
      total.add(mass[j]);
    }
    double tv = total.value();
    for (std::size_t j = 0; j < b; ++j) mass[j] /= tv;
    return mass;
  }
  ExactSum total;
  for (std::size_t j = 0; j < b; ++j) {
    double a = grid.lo + w * static_cast<double>(j);
    double bb = j + 1 == b ? grid.hi : grid.lo + w * static_cast<double>(j + 1);
    mass[j] = integrate_density(a, bb, mu, sigma);
    total.add(mass[j]);
  }
  double tv = total.value();
  if (tv < 1e-300) {
    std::fill(mass.begin(), mass.end(), 0.0);
    mass[clip_bin_index(mu, grid)] = 1.0;
    return mass;
  }
  for (std::size_t j = 0; j < b; ++j) mass[j] = std::max(0.0, mass[j]) / tv;
  return mass;
}

// ---- per-latent tables -----------------------------------------------------

struct LatentTables {
  TupleSpace space;                       // over depends_on (size 1 for noise)
  std::vector<std::vector<double>> bins;  // per restricted tuple
  std::vector<double> bin_entropy;        // per restricted tuple
  std::vector<double> mean_value;         // per restricted tuple
  std::vector<std::size_t> mean_bin;      // per restricted tuple
};

LatentTables latent_tables(const DiscreteWorld& world, std::size_t i, const EvalConfig& cfg) {
  const LatentSpec& spec = world.latents[i];
  LatentTables t;
  t.space = tuple_space(world, spec.depends_on);
  t.bins.resize(t.space.size);
  t.bin_entropy.resize(t.space.size);
  t.mean_value.resize(t.space.size);
  t.mean_bin.resize(t.space.size);
  for (std::size_t r = 0; r < t.space.size; ++r) {
    double mu = spec.noise ? 0.0 : spec.mu[r];
    t.bins[r] = oracle_bin_masses(mu, spec.sigma, cfg);
    t.bin_entropy[r] = entropy_of(t.bins[r]);
    t.mean_value[r] = mu;
    t.mean_bin[r] = clip_bin_index(mu, cfg.grid);
  }
  return t;
}

// Accumulate w * outer product of the member bin vectors into a flat table.
void accumulate_outer(std::vector<double>& table, const std::vector<const double*>& vecs,
                      std::size_t b, double w) {
  std::size_t depth = vecs.size();
  if (depth == 1) {
    for (std::size_t x = 0; x < b; ++x) table[x] += w * vecs[0][x];
    return;
  }
  if (depth == 2) {
    for (std::size_t x = 0; x < b; ++x) {
      double wx = w * vecs[0][x];
      if (wx == 0.0) continue;
      double* row = table.data() + x * b;
      for (std::size_t y = 0; y < b; ++y) row[y] += wx * vecs[1][y];
    }
    return;
  }
  if (depth == 3) {
    for (std::size_t x = 0; x < b; ++x) {
      double wx = w * vecs[0][x];
      if (wx == 0.0) continue;
      for (std::size_t y = 0; y < b; ++y) {
        double wxy = wx * vecs[1][y];
        if (wxy == 0.0) continue;
        double* row = table.data() + (x * b + y) * b;
        for (std::size_t z = 0; z < b; ++z) row[z] += wxy * vecs[2][z];
      }
    }
    return;
  }
  std::vector<std::size_t> idx(depth, 0);
  for (;;) {
    double prod = w;
    std::size_t flat = 0;
    for (std::size_t d = 0; d < depth; ++d) {
      prod *= vecs[d][idx[d]];
      flat = flat * b + idx[d];
    }
    table[flat] += prod;
    std::size_t d = depth;
    while (d-- > 0) {
      if (++idx[d] < b) break;
      idx[d] = 0;
      if (d == 0) return;
    }
  }
}

double table_entropy(const std::vector<double>& table) {
  ExactSum s;
  for (double v : table)
    if (v > 0.0) s.add(-v * floored_log(v));
  return std::max(0.0, s.value());
}

// H and I(x, .) of a latent subset inside one dependency group, by exact
// mixture enumeration over the group's tuple space.
struct SubsetInfo {
  double h = 0.0;        // quantized joint entropy of the subset
  double h_given = 0.0;  // mean conditional bin entropy
  double mi_x = 0.0;     // h - h_given, clamped
};

SubsetInfo subset_info(const DiscreteWorld& world, const std::vector<LatentTables>& tables,
                       const TupleSpace& group_space, const std::vector<std::size_t>& members,
                       std::size_t n_bins) {
  SubsetInfo out;
  if (members.empty()) return out;
  double cells = std::pow(static_cast<double>(n_bins), static_cast<double>(members.size()));
  if (cells > static_cast<double>(kEnumerationCap) + 0.5)
    throw Error(ErrorCode::TooLarge, "group bin table exceeds the enumeration cap");
  std::vector<double> joint(static_cast<std::size_t>(cells), 0.0);
  double w = 1.0 / static_cast<double>(group_space.size);
  ExactSum h_given;
  std::vector<const double*> vecs(members.size());
  for (std::size_t t = 0; t < group_space.size; ++t) {
    std::vector<std::int32_t> vals = decode_tuple(group_space, t);
    for (std::size_t m = 0; m < members.size(); ++m) {
      std::size_t i = members[m];
      std::size_t r = restricted_index(group_space, vals, world, world.latents[i].depends_on);
      vecs[m] = tables[i].bins[r].data();
      h_given.add(w * tables[i].bin_entropy[r]);
    }
    accumulate_outer(joint, vecs, n_bins, w);
  }
  out.h = table_entropy(joint);
  out.h_given = h_given.value();
  out.mi_x = std::max(0.0, out.h - out.h_given);
  return out;
}

// Joint of (latent bin source, factor value) over the union tuple space;
// source picks full-posterior bin vectors or point masses at the mean bin.
std::vector<double> latent_factor_joint(const DiscreteWorld& world, const LatentTables& lt,
                                        std::size_t i, std::size_t k, std::size_t n_bins,
                                        bool conditional_mean) {
  std::vector<std::size_t> u = union_factors(world.latents[i].depends_on, {k});
  TupleSpace space = tuple_space(world, u);
  auto card = static_cast<std::size_t>(world.cardinalities[k]);
  std::vector<double> joint(n_bins * card, 0.0);
  double w = 1.0 / static_cast<double>(space.size);
  for (std::size_t t = 0; t < space.size; ++t) {
    std::vector<std::int32_t> vals = decode_tuple(space, t);
    std::size_t r = restricted_index(space, vals, world, world.latents[i].depends_on);
    std::size_t v = restricted_index(space, vals, world, {k});
    if (conditional_mean) {
      joint[lt.mean_bin[r] * card + v] += w;
    } else {
      const std::vector<double>& bins = lt.bins[r];
      for (std::size_t s = 0; s < n_bins; ++s) joint[s * card + v] += w * bins[s];
    }
  }
  return joint;
}

double joint_mi(const std::vector<double>& joint, std::size_t rows, std::size_t cols) {
  std::vector<double> rm(rows, 0.0), cm(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      rm[r] += joint[r * cols + c];
      cm[c] += joint[r * cols + c];
    }
  return std::max(0.0, entropy_of(rm) + entropy_of(cm) - table_entropy(joint));
}

void top_two(const std::vector<double>& column, std::size_t& top, std::size_t& second) {
  top = 0;
  for (std::size_t i = 1; i < column.size(); ++i)
    if (column[i] > column[top]) top = i;
  second = top == 0 ? 1 : 0;
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (i == top) continue;
    if (column[i] > column[second]) second = i;
  }
}

void modularity_from(const std::vector<double>& mi, std::size_t l, std::size_t k,
                     std::vector<double>& scores, std::vector<bool>& has_value, double& average) {
  scores.assign(l, 0.0);
  has_value.assign(l, false);
  ExactSum sum;
  std::size_t count = 0;
  for (std::size_t i = 0; i < l; ++i) {
    std::size_t best = 0;
    for (std::size_t f = 1; f < k; ++f)
      if (mi[i * k + f] > mi[i * k + best]) best = f;
    double theta = mi[i * k + best];
    if (theta <= kZeroMiRow) continue;
    ExactSum off;
    for (std::size_t f = 0; f < k; ++f) {
      if (f == best) continue;
      off.add(mi[i * k + f] * mi[i * k + f]);
    }
    scores[i] = 1.0 - off.value() / (theta * theta * static_cast<double>(k - 1));
    has_value[i] = true;
    sum.add(scores[i]);
    ++count;
  }
  average = count > 0 ? sum.value() / static_cast<double>(count) : 0.0;
}

std::vector<double> top_k_means(const std::vector<double>& vals) {
  std::vector<std::size_t> order(vals.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
  std::vector<double> out(vals.size());
  ExactSum acc;
  for (std::size_t r = 0; r < order.size(); ++r) {
    acc.add(vals[order[r]]);
    out[r] = acc.value() / static_cast<double>(r + 1);
  }
  return out;
}

}  // namespace

ExactTables exact_metrics(const DiscreteWorld& world, const EvalConfig& cfg) {
  cfg.validate();
  world.validate();
  std::size_t L = world.n_latents();
  std::size_t K = world.n_factors();
  std::size_t B = cfg.grid.n_bins;
  double log_bins = std::log(static_cast<double>(B));

  ExactTables out;
  out.n_latents = L;
  out.n_factors = K;
  out.n_states = world.n_states();

  out.factor_entropy.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    auto c = static_cast<double>(world.cardinalities[k]);
    std::vector<double> uniform(static_cast<std::size_t>(world.cardinalities[k]), 1.0 / c);
    out.factor_entropy[k] = entropy_of(uniform);
  }

  std::vector<LatentTables> tables;
  tables.reserve(L);
  for (std::size_t i = 0; i < L; ++i) tables.push_back(latent_tables(world, i, cfg));

  // Dependency groups: latents sharing any factor belong to one group and
  // are mutually independent across groups (uniform full-grid dataset).
  std::vector<std::size_t> group_of(L);
  std::iota(group_of.begin(), group_of.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (group_of[x] != x) x = group_of[x] = group_of[group_of[x]];
    return x;
  };
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = i + 1; j < L; ++j) {
      std::vector<std::size_t> inter;
      std::set_intersection(world.latents[i].depends_on.begin(), world.latents[i].depends_on.end(),
                            world.latents[j].depends_on.begin(), world.latents[j].depends_on.end(),
                            std::back_inserter(inter));
      if (!inter.empty()) group_of[find(i)] = find(j);
    }
  std::vector<std::vector<std::size_t>> groups;
  {
    std::vector<std::size_t> root_slot(L, SIZE_MAX);
    for (std::size_t i = 0; i < L; ++i) {
      std::size_t r = find(i);
      if (root_slot[r] == SIZE_MAX) {
        root_slot[r] = groups.size();
        groups.emplace_back();
      }
      groups[root_slot[r]].push_back(i);
    }
  }

  // Quantized per-latent quantities and the exact information terms, group
  // by group.
  out.h_latent.resize(L);
  out.h_latent_given_x.resize(L);
  out.informativeness.resize(L);
  out.informativeness_normalized.resize(L);
  out.mi_single.resize(L);
  out.sepin.resize(L);
  out.indin.resize(L);
  ExactSum total_info;
  for (const std::vector<std::size_t>& g : groups) {
    std::vector<std::size_t> all_deps;
    for (std::size_t i : g) all_deps = union_factors(all_deps, world.latents[i].depends_on);
    TupleSpace space = tuple_space(world, all_deps);
    SubsetInfo full = subset_info(world, tables, space, g, B);
    total_info.add(full.mi_x);
    std::vector<SubsetInfo> singles(g.size()), rests(g.size());
    for (std::size_t m = 0; m < g.size(); ++m) {
      singles[m] = subset_info(world, tables, space, {g[m]}, B);
      std::vector<std::size_t> rest;
      for (std::size_t o = 0; o < g.size(); ++o)
        if (o != m) rest.push_back(g[o]);
      rests[m] = subset_info(world, tables, space, rest, B);
    }
    for (std::size_t m = 0; m < g.size(); ++m) {
      std::size_t i = g[m];
      out.h_latent[i] = singles[m].h;
      out.h_latent_given_x[i] = singles[m].h_given;
      out.informativeness[i] = singles[m].mi_x;
      out.informativeness_normalized[i] = singles[m].mi_x / log_bins;
      out.mi_single[i] = singles[m].mi_x;
      out.sepin[i] = std::max(0.0, full.mi_x - rests[m].mi_x);
      double mi_pair = g.size() == 1 ? 0.0 : singles[m].h + rests[m].h - full.h;
      out.indin[i] = out.mi_single[i] - mi_pair;
    }
  }
  out.total_information = total_info.value();

  // MI matrices and per-pair tables.
  out.mi_full.assign(L * K, 0.0);
  out.joint_entropy_full.assign(L * K, 0.0);
  out.mi_cm.assign(L * K, 0.0);
  out.h_latent_cm.resize(L);
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t k = 0; k < K; ++k) {
      std::vector<double> joint = latent_factor_joint(world, tables[i], i, k, B, false);
      out.mi_full[i * K + k] = joint_mi(joint, B, static_cast<std::size_t>(world.cardinalities[k]));
      out.joint_entropy_full[i * K + k] = table_entropy(joint);
      std::vector<double> cm = latent_factor_joint(world, tables[i], i, k, B, true);
      out.mi_cm[i * K + k] = joint_mi(cm, B, static_cast<std::size_t>(world.cardinalities[k]));
    }
    std::vector<double> cm_marginal(B, 0.0);
    double w = 1.0 / static_cast<double>(tables[i].space.size);
    for (std::size_t r = 0; r < tables[i].space.size; ++r) cm_marginal[tables[i].mean_bin[r]] += w;
    out.h_latent_cm[i] = entropy_of(cm_marginal);
  }

  out.misjed_raw.assign(L * L, 0.0);
  out.misjed_normalized.assign(L * L, 0.0);
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = i + 1; j < L; ++j) {
      std::vector<std::size_t> u =
          union_factors(world.latents[i].depends_on, world.latents[j].depends_on);
      TupleSpace space = tuple_space(world, u);
      std::vector<double> joint(B * B, 0.0);
      double w = 1.0 / static_cast<double>(space.size);
      for (std::size_t t = 0; t < space.size; ++t) {
        std::vector<std::int32_t> vals = decode_tuple(space, t);
        std::size_t ri = restricted_index(space, vals, world, world.latents[i].depends_on);
        std::size_t rj = restricted_index(space, vals, world, world.latents[j].depends_on);
        joint[tables[i].mean_bin[ri] * B + tables[j].mean_bin[rj]] += w;
      }
      double raw = std::max(0.0, out.h_latent[i] + out.h_latent[j] - table_entropy(joint));
      out.misjed_raw[i * L + j] = raw;
      out.misjed_raw[j * L + i] = raw;
      out.misjed_normalized[i * L + j] = raw / (2.0 * log_bins);
      out.misjed_normalized[j * L + i] = raw / (2.0 * log_bins);
    }
  }

  // RMIG / JEMMIG per factor.
  out.rmig_raw.resize(K);
  out.rmig_normalized.resize(K);
  out.jemmig_raw.resize(K);
  out.jemmig_normalized.resize(K);
  if (L >= 2) {
    for (std::size_t k = 0; k < K; ++k) {
      std::vector<double> column(L);
      for (std::size_t i = 0; i < L; ++i) column[i] = out.mi_full[i * K + k];
      std::size_t top, second;
      top_two(column, top, second);
      double hy = out.factor_entropy[k];
      out.rmig_raw[k] = std::max(0.0, column[top] - column[second]);
      out.rmig_normalized[k] =
          hy > 0.0 ? std::min(1.0, std::max(0.0, out.rmig_raw[k] / hy)) : 0.0;
      out.jemmig_raw[k] = out.joint_entropy_full[top * K + k] - column[top] + column[second];
      double norm = (out.h_latent[top] + hy - 2.0 * column[top] + column[second]) / (log_bins + hy);
      out.jemmig_normalized[k] = std::min(1.0, std::max(0.0, norm));
    }
    ExactSum r1, r2, j1, j2;
    for (std::size_t k = 0; k < K; ++k) {
      r1.add(out.rmig_raw[k]);
      r2.add(out.rmig_normalized[k]);
      j1.add(out.jemmig_raw[k]);
      j2.add(out.jemmig_normalized[k]);
    }
    out.rmig_aggregate = r1.value() / static_cast<double>(K);
    out.rmig_normalized_aggregate = r2.value() / static_cast<double>(K);
    out.jemmig_aggregate = j1.value() / static_cast<double>(K);
    out.jemmig_normalized_aggregate = j2.value() / static_cast<double>(K);
  }

  out.modularity_defined = K >= 2;
  if (out.modularity_defined) {
    modularity_from(out.mi_full, L, K, out.modularity_full, out.modularity_full_has_value,
                    out.modularity_full_average);
    modularity_from(out.mi_cm, L, K, out.modularity_cm, out.modularity_cm_has_value,
                    out.modularity_cm_average);
  }

  // Weighted aggregates over the exact information terms.
  {
    ExactSum total;
    for (std::size_t i = 0; i < L; ++i) total.add(out.mi_single[i]);
    double tv = total.value();
    out.weights_defined = tv > kUninformativeTotal;
    if (out.weights_defined) {
      out.rho.resize(L);
      ExactSum ws, wi;
      for (std::size_t i = 0; i < L; ++i) {
        out.rho[i] = out.mi_single[i] / tv;
        ws.add(out.rho[i] * out.sepin[i]);
        wi.add(out.rho[i] * out.indin[i]);
      }
      out.wsepin = ws.value();
      out.windin = wi.value();
    }
    out.sepin_at = top_k_means(out.sepin);
    out.indin_at = top_k_means(out.indin);
  }

  // Pearson correlation of the conditional means (population convention).
  out.corr_means.assign(L * L, 0.0);
  {
    std::vector<double> mean(L), var(L);
    for (std::size_t i = 0; i < L; ++i) {
      double w = 1.0 / static_cast<double>(tables[i].space.size);
      ExactSum m1, m2;
      for (std::size_t r = 0; r < tables[i].space.size; ++r) {
        m1.add(w * tables[i].mean_value[r]);
        m2.add(w * tables[i].mean_value[r] * tables[i].mean_value[r]);
      }
      mean[i] = m1.value();
      var[i] = std::max(0.0, m2.value() - mean[i] * mean[i]);
    }
    for (std::size_t i = 0; i < L; ++i) {
      out.corr_means[i * L + i] = 1.0;
      for (std::size_t j = i + 1; j < L; ++j) {
        double c = 0.0;
        if (var[i] > 0.0 && var[j] > 0.0) {
          std::vector<std::size_t> u =
              union_factors(world.latents[i].depends_on, world.latents[j].depends_on);
          TupleSpace space = tuple_space(world, u);
          double w = 1.0 / static_cast<double>(space.size);
          ExactSum cross;
          for (std::size_t t = 0; t < space.size; ++t) {
            std::vector<std::int32_t> vals = decode_tuple(space, t);
            std::size_t ri = restricted_index(space, vals, world, world.latents[i].depends_on);
            std::size_t rj = restricted_index(space, vals, world, world.latents[j].depends_on);
            cross.add(w * tables[i].mean_value[ri] * tables[j].mean_value[rj]);
          }
          double cov = cross.value() - mean[i] * mean[j];
          c = cov / std::sqrt(var[i] * var[j]);
          c = std::min(1.0, std::max(-1.0, c));
        }
        out.corr_means[i * L + j] = c;
        out.corr_means[j * L + i] = c;
      }
    }
  }

  return out;
}

}  // namespace dismet
