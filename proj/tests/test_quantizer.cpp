#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "dismet/errors.hpp"
#include "dismet/exact_sum.hpp"
#include "dismet/quantizer.hpp"
#include "test_helpers.hpp"

using namespace dismet;
using testutil::const_ps;
using testutil::make_ps;
using testutil::two_cluster_ps;

namespace {

EvalConfig default_cfg() { return EvalConfig{}; }

double pmf_sum(const Pmf& p) { return exact_sum(p.probs); }

}  // namespace

TEST_CASE("bin_posterior splits evenly across a shared edge") {
  QuantizationGrid g{-4.0, 4.0, 8};
  for (BinMethod m : {BinMethod::Erf, BinMethod::Rectangle}) {
    Pmf p = bin_posterior(0.0, 0.1, g, m);
    CHECK(p.size() == 8);
    CHECK(pmf_sum(p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p[3] == doctest::Approx(0.5).epsilon(1e-9));  // [-1, 0)
    CHECK(p[4] == doctest::Approx(0.5).epsilon(1e-9));  // [0, 1)
  }
}

TEST_CASE("bin_posterior concentrates sharp posteriors") {
  QuantizationGrid g{-4.0, 4.0, 8};
  Pmf p = bin_posterior(0.5, 0.01, g, BinMethod::Erf);
  CHECK(p[4] >= 1.0 - 1e-10);
}

TEST_CASE("bin_posterior mirror symmetry at mu=0") {
  QuantizationGrid g{-4.0, 4.0, 100};
  for (BinMethod m : {BinMethod::Erf, BinMethod::Rectangle}) {
    for (double sigma : {0.05, 0.4, 1.0, 3.0}) {
      Pmf p = bin_posterior(0.0, sigma, g, m);
      for (std::size_t j = 0; j < 50; ++j) {
        CHECK(p[j] == doctest::Approx(p[99 - j]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("erf and rectangle agree for smooth posteriors") {
  QuantizationGrid g{-4.0, 4.0, 100};
  for (double mu : {-1.3, 0.0, 0.77}) {
    Pmf a = bin_posterior(mu, 0.5, g, BinMethod::Erf);
    Pmf b = bin_posterior(mu, 0.5, g, BinMethod::Rectangle);
    for (std::size_t j = 0; j < 100; ++j) CHECK(std::abs(a[j] - b[j]) < 1e-3);
  }
}

TEST_CASE("bin_posterior far outside the grid degrades to a boundary point mass") {
  QuantizationGrid g{-4.0, 4.0, 100};
  Pmf p = bin_posterior(100.0, 1e-6, g, BinMethod::Erf);
  CHECK(p[99] == 1.0);
  Pmf q = bin_posterior(-100.0, 1e-6, g, BinMethod::Rectangle);
  CHECK(q[0] == 1.0);
}

TEST_CASE("bin_posterior rejects bad input") {
  QuantizationGrid coarse{-4.0, 4.0, 1};
  CHECK_THROWS_AS(bin_posterior(0.0, 1.0, coarse, BinMethod::Erf), const Error&);
  QuantizationGrid g{-4.0, 4.0, 8};
  CHECK_THROWS_AS(bin_posterior(0.0, 0.0, g, BinMethod::Erf), const Error&);
}

TEST_CASE("pmf_entropy") {
  std::vector<double> uniform(100, 0.01);
  CHECK(pmf_entropy(uniform) == doctest::Approx(std::log(100.0)).epsilon(1e-12));
  std::vector<double> point(100, 0.0);
  point[3] = 1.0;
  CHECK(pmf_entropy(point) == 0.0);
  std::vector<double> two(100, 0.0);
  two[0] = two[1] = 0.5;
  CHECK(pmf_entropy(two) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("marginal_latent_pmf") {
  EvalConfig cfg = default_cfg();

  PosteriorSet one = const_ps(1, 1, 0.3, 0.2);
  Pmf m = marginal_latent_pmf(one, 0, cfg);
  Pmf direct = bin_posterior(0.3, 0.2, cfg.grid, cfg.bin_method);
  for (std::size_t j = 0; j < 100; ++j) CHECK(m[j] == doctest::Approx(direct[j]).epsilon(1e-14));

  PosteriorSet bim = two_cluster_ps(1, 0.1);
  Pmf b = marginal_latent_pmf(bim, 0, cfg);
  ExactSum left, right;
  for (std::size_t j = 0; j < 50; ++j) left.add(b[j]);
  for (std::size_t j = 50; j < 100; ++j) right.add(b[j]);
  CHECK(left.value() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(right.value() == doctest::Approx(0.5).epsilon(1e-9));

  PosteriorSet same = const_ps(7, 1, -0.4, 0.3);
  Pmf s = marginal_latent_pmf(same, 0, cfg);
  Pmf d = bin_posterior(-0.4, 0.3, cfg.grid, cfg.bin_method);
  for (std::size_t j = 0; j < 100; ++j) CHECK(s[j] == doctest::Approx(d[j]).epsilon(1e-13));
}

TEST_CASE("joint_latent_factor_pmf on a binary invertible code") {
  EvalConfig cfg = default_cfg();
  PosteriorSet ps = two_cluster_ps(2, 0.01);
  FactorTable ft = FactorTable::create(4, 1, {0, 0, 1, 1}, {2});
  JointPmf j = joint_latent_factor_pmf(ps, ft, 0, 0, cfg);
  CHECK(j.cols == 2);
  CHECK(mutual_information(j) == doctest::Approx(std::log(2.0)).epsilon(1e-9));

  // identical posteriors carry no label information
  PosteriorSet flat = const_ps(4, 1, 0.0, 1.0);
  CHECK(mutual_information(joint_latent_factor_pmf(flat, ft, 0, 0, cfg)) <= 1e-12);

  // uninformative soft labels
  FactorTable soft = FactorTable::create(4, 1, {0, 0, 1, 1}, {2});
  soft.attach_soft(0, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
  CHECK(mutual_information(joint_latent_factor_pmf(ps, soft, 0, 0, cfg)) <= 1e-12);
}

TEST_CASE("joint_latent_pair_pmf") {
  EvalConfig cfg = default_cfg();

  PosteriorSet flat = const_ps(5, 2, 0.2, 0.7);
  JointPmf j = joint_latent_pair_pmf(flat, 0, 1, cfg);
  CHECK(mutual_information(j) <= 1e-12);

  // z_1 mirrors z_0 across two clusters
  PosteriorSet mirror = make_ps(4, 2, {-1, -1, -1, -1, 1, 1, 1, 1}, {.01, .01, .01, .01, .01, .01, .01, .01});
  JointPmf m = joint_latent_pair_pmf(mirror, 0, 1, cfg);
  CHECK(mutual_information(m) == doctest::Approx(std::log(2.0)).epsilon(1e-9));

  CHECK_THROWS_AS(joint_latent_pair_pmf(flat, 1, 1, cfg), const Error&);
}

TEST_CASE("joint tables reproduce their marginals") {
  EvalConfig cfg = default_cfg();
  PosteriorSet ps = make_ps(6, 2, {-1.2, 0.3, 0.0, -0.5, 0.9, 1.4, 2.0, -2.0, 0.7, 0.1, -0.9, 0.4},
                            {0.3, 0.8, 0.5, 1.1, 0.2, 0.6, 0.4, 0.9, 1.3, 0.25, 0.45, 0.7});
  FactorTable ft = FactorTable::create(6, 1, {0, 1, 2, 0, 1, 2}, {3});

  JointPmf pair = joint_latent_pair_pmf(ps, 0, 1, cfg);
  CHECK(exact_sum(pair.probs) == doctest::Approx(1.0).epsilon(1e-9));
  Pmf m0 = marginal_latent_pmf(ps, 0, cfg);
  Pmf m1 = marginal_latent_pmf(ps, 1, cfg);
  auto rows = pair.row_marginal();
  auto cols = pair.col_marginal();
  for (std::size_t j = 0; j < 100; ++j) {
    CHECK(std::abs(rows[j] - m0[j]) < 1e-9);
    CHECK(std::abs(cols[j] - m1[j]) < 1e-9);
  }

  JointPmf jf = joint_latent_factor_pmf(ps, ft, 1, 0, cfg);
  CHECK(exact_sum(jf.probs) == doctest::Approx(1.0).epsilon(1e-9));
  auto frows = jf.row_marginal();
  auto fcols = jf.col_marginal();
  auto fd = factor_distribution(ft, 0);
  for (std::size_t j = 0; j < 100; ++j) CHECK(std::abs(frows[j] - m1[j]) < 1e-9);
  for (std::size_t v = 0; v < 3; ++v) CHECK(std::abs(fcols[v] - fd[v]) < 1e-9);

  double mi = mutual_information(pair);
  CHECK(mi >= 0.0);
  CHECK(mi <= std::min(pmf_entropy(m0), pmf_entropy(m1)) + 1e-9);
}

TEST_CASE("conditional mean tables") {
  EvalConfig cfg = default_cfg();

  PosteriorSet origin = const_ps(5, 2, 0.0, 1.0);
  JointPmf j = conditional_mean_joint_pmf(origin, 0, 1, cfg);
  CHECK(pmf_entropy(j) == 0.0);

  // means laid out row-major [n x L]: samples at the four corners
  PosteriorSet four = make_ps(4, 2, {-2, -2, -2, 2, 2, -2, 2, 2}, {1, 1, 1, 1, 1, 1, 1, 1});
  JointPmf f = conditional_mean_joint_pmf(four, 0, 1, cfg);
  CHECK(pmf_entropy(f) == doctest::Approx(std::log(4.0)).epsilon(1e-12));

  PosteriorSet outside = const_ps(3, 2, 5.0, 1.0);
  JointPmf c = conditional_mean_joint_pmf(outside, 0, 1, cfg);
  CHECK(c.at(99, 99) == 1.0);

  Pmf cm = conditional_mean_pmf(four, 0, cfg);
  CHECK(pmf_entropy(cm) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  FactorTable ft = FactorTable::create(4, 1, {0, 0, 1, 1}, {2});
  JointPmf cf = conditional_mean_factor_pmf(four, ft, 0, 0, cfg);
  CHECK(mutual_information(cf) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("informativeness_quantized") {
  EvalConfig cfg = default_cfg();

  // identical rows: the marginal equals each conditional up to one rounding
  PosteriorSet flat = const_ps(6, 1, 0.0, 1.0);
  CHECK(std::abs(informativeness_quantized(flat, 0, cfg)) < 1e-12);

  PosteriorSet clusters = two_cluster_ps(3, 0.05);
  double mi = informativeness_quantized(clusters, 0, cfg);
  CHECK(mi == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(mi >= 0.0);
  CHECK(mi <= std::log(100.0));
}

TEST_CASE("mean_conditional_bin_entropy matches the average of row entropies") {
  EvalConfig cfg = default_cfg();
  PosteriorSet ps = make_ps(3, 1, {-1.0, 0.2, 0.9}, {0.3, 0.5, 0.8});
  ExactSum acc;
  for (std::size_t n = 0; n < 3; ++n) {
    acc.add(pmf_entropy(bin_posterior(ps.mean(n, 0), ps.stddev(n, 0), cfg.grid, cfg.bin_method)));
  }
  CHECK(mean_conditional_bin_entropy(ps, 0, cfg) ==
        doctest::Approx(acc.value() / 3.0).epsilon(1e-13));
}
