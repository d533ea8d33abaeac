#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "dismet/errors.hpp"
#include "dismet/exact_sum.hpp"
#include "dismet/rng.hpp"
#include "dismet/types.hpp"

using namespace dismet;

TEST_CASE("PosteriorSet validation") {
  CHECK_NOTHROW(PosteriorSet::create(2, 2, {0, 1, 2, 3}, {1, 1, 1, 1}));
  CHECK_THROWS_AS(PosteriorSet::create(2, 2, {0, 1, 2}, {1, 1, 1, 1}), const Error&);
  CHECK_THROWS_AS(PosteriorSet::create(2, 1, {0, std::nan("")}, {1, 1}), const Error&);
  CHECK_THROWS_AS(PosteriorSet::create(2, 1, {0, 1}, {1, 0}), const Error&);
  CHECK_THROWS_AS(PosteriorSet::create(2, 1, {0, 1}, {1, -0.5}), const Error&);
  CHECK_THROWS_AS(PosteriorSet::create(2, 1, {0, 1}, {1, std::nan("")}), const Error&);
  CHECK_THROWS_AS(PosteriorSet::create(0, 1, {}, {}), const Error&);

  PosteriorSet ps = PosteriorSet::create(2, 3, {0, 1, 2, 3, 4, 5}, {1, 2, 3, 4, 5, 6});
  CHECK(ps.mean(1, 2) == 5.0);
  CHECK(ps.stddev(0, 1) == 2.0);
}

TEST_CASE("FactorTable validation") {
  CHECK_NOTHROW(FactorTable::create(3, 1, {0, 1, 2}, {3}));
  CHECK_THROWS_AS(FactorTable::create(3, 1, {0, 1, 5}, {3}), const Error&);
  CHECK_THROWS_AS(FactorTable::create(3, 1, {0, -1, 2}, {3}), const Error&);
  CHECK_THROWS_AS(FactorTable::create(3, 1, {0, 1, 2}, {0}), const Error&);
  CHECK_THROWS_AS(FactorTable::create(2, 2, {0, 0, 0}, {1, 1}), const Error&);

  FactorTable ft = FactorTable::create(2, 2, {0, 1, 1, 0}, {2, 2});
  CHECK(ft.label(1, 0) == 1);
  CHECK(ft.cardinality(1) == 2);
}

TEST_CASE("soft labels row-stochastic check") {
  FactorTable ft = FactorTable::create(2, 1, {0, 1}, {4});
  CHECK_NOTHROW(ft.attach_soft(0, {0.25, 0.25, 0.25, 0.25, 1.0, 0.0, 0.0, 0.0}));
  FactorTable bad = FactorTable::create(2, 1, {0, 1}, {4});
  CHECK_THROWS_AS(bad.attach_soft(0, {0.3, 0.25, 0.25, 0.25, 1.0, 0.0, 0.0, 0.0}), const Error&);
  CHECK_THROWS_AS(bad.attach_soft(0, {0.5, 0.5}), const Error&);
  CHECK_THROWS_AS(bad.attach_soft(1, {0.5, 0.5, 0.5, 0.5}), const Error&);
}

TEST_CASE("factor distribution and entropy") {
  FactorTable ft = FactorTable::create(4, 1, {0, 0, 0, 1}, {2});
  auto d = factor_distribution(ft, 0);
  CHECK(d[0] == doctest::Approx(0.75));
  CHECK(d[1] == doctest::Approx(0.25));
  CHECK(empirical_factor_entropy(ft, 0) == doctest::Approx(0.5623351446188083).epsilon(1e-12));

  FactorTable soft = FactorTable::create(4, 1, {0, 0, 0, 1}, {2});
  soft.attach_soft(0, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
  auto ds = factor_distribution(soft, 0);
  CHECK(ds[0] == doctest::Approx(0.5));
  CHECK(empirical_factor_entropy(soft, 0) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  FactorTable constant = FactorTable::create(3, 1, {1, 1, 1}, {3});
  CHECK(empirical_factor_entropy(constant, 0) == 0.0);
}

TEST_CASE("quantization grid") {
  QuantizationGrid g{};
  CHECK(g.width() == doctest::Approx(0.08));
  CHECK(g.edge(0) == -4.0);
  CHECK(g.edge(100) == 4.0);
  CHECK(g.center(50) == doctest::Approx(0.04));
  CHECK(g.clip_bin(-100.0) == 0);
  CHECK(g.clip_bin(100.0) == 99);
  CHECK(g.clip_bin(4.0) == 99);
  CHECK(g.clip_bin(-4.0) == 0);
  CHECK(g.clip_bin(0.0) == 50);

  QuantizationGrid bad{1.0, 1.0, 10};
  CHECK_THROWS_AS(bad.validate(), const Error&);
  QuantizationGrid one{-1.0, 1.0, 1};
  CHECK_THROWS_AS(one.validate(), const Error&);
}

TEST_CASE("config validation") {
  EvalConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.grid.n_bins = 1;
  CHECK_THROWS_AS(cfg.validate(), const Error&);
  cfg = EvalConfig{};
  cfg.n_mc_samples = 0;
  CHECK_THROWS_AS(cfg.validate(), const Error&);
  cfg = EvalConfig{};
  cfg.factor_bins = 0;
  CHECK_THROWS_AS(cfg.validate(), const Error&);
}

TEST_CASE("exact sum is order independent") {
  std::vector<double> v;
  for (int i = 0; i < 400; ++i) {
    v.push_back(std::pow(10.0, (i % 37) - 18) * ((i % 2) ? 1 : -1));
    v.push_back(0.1 * i);
  }
  double reference = exact_sum(v);
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(v.begin(), v.end(), rng);
    CHECK(exact_sum(v) == reference);
  }
}

TEST_CASE("exact sum cancellation") {
  ExactSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1.0);

  ExactSum tiny;
  for (int i = 0; i < 10; ++i) tiny.add(0.1);
  CHECK(tiny.value() == 1.0);  // correctly rounded sum of ten 0.1 doubles
}

TEST_CASE("counter rng basics") {
  CHECK(rng::hash4(1, 2, 3, 4) == rng::hash4(1, 2, 3, 4));
  CHECK(rng::hash4(1, 2, 3, 4) != rng::hash4(1, 2, 3, 5));
  CHECK(rng::hash4(1, 2, 3, 4) != rng::hash4(2, 2, 3, 4));
  CHECK(rng::latent_normal(9, 100, 3) == rng::latent_normal(9, 100, 3));

  for (std::uint64_t i = 0; i < 2000; ++i) {
    double u = rng::to_unit(rng::hash4(3, rng::kGeneric, i, 0));
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("source_index stays in range and covers rows") {
  std::vector<std::size_t> counts(3, 0);
  for (std::uint64_t m = 0; m < 30000; ++m) {
    std::size_t s = rng::source_index(11, m, 3);
    REQUIRE(s < 3);
    counts[s]++;
  }
  for (std::size_t c : counts) {
    CHECK(c > 8000);
    CHECK(c < 12000);
  }
}

TEST_CASE("normal stream moments") {
  ExactSum sum, sumsq;
  const std::size_t m = 20000;
  for (std::uint64_t i = 0; i < m; ++i) {
    double z = rng::latent_normal(5, i, 0);
    sum.add(z);
    sumsq.add(z * z);
  }
  double mean = sum.value() / m;
  double var = sumsq.value() / m - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
}
