#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dismet/kernels.hpp"
#include "dismet/rng.hpp"

using namespace dismet;

namespace {

struct Rows {
  std::vector<double> mu, inv_sigma, c0;
};

Rows make_rows(std::size_t n, std::uint64_t seed) {
  Rows r;
  r.mu.resize(n);
  r.inv_sigma.resize(n);
  r.c0.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.mu[i] = 3.0 * (rng::to_unit(rng::hash4(seed, 11, i, 0)) - 0.5);
    r.inv_sigma[i] = 0.5 + 3.0 * rng::to_unit(rng::hash4(seed, 12, i, 0));
    r.c0[i] = -std::log(1.0 / r.inv_sigma[i]) - 0.9189385332046727;
  }
  return r;
}

void check_tables_agree(const kernels::KernelTable& a, const kernels::KernelTable& b,
                        std::size_t n) {
  Rows r = make_rows(n, 77);
  std::vector<double> outa(n, 0.25), outb(n, 0.25);
  a.gauss_logpdf_accum(0.4, r.mu.data(), r.inv_sigma.data(), r.c0.data(), outa.data(), n);
  b.gauss_logpdf_accum(0.4, r.mu.data(), r.inv_sigma.data(), r.c0.data(), outb.data(), n);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(outa[i] == doctest::Approx(outb[i]).epsilon(1e-12));
  }

  std::vector<double> xs(n), ea(n), eb(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = 8.0 * (rng::to_unit(rng::hash4(13, 1, i, 0)) - 0.5);
  a.erf_poly_batch(xs.data(), ea.data(), n);
  b.erf_poly_batch(xs.data(), eb.data(), n);
  for (std::size_t i = 0; i < n; ++i) CHECK(ea[i] == doctest::Approx(eb[i]).epsilon(1e-12));

  CHECK(a.max_reduce(xs.data(), n) == b.max_reduce(xs.data(), n));
}

}  // namespace

TEST_CASE("scalar gauss_logpdf_accum matches direct formula") {
  const std::size_t n = 9;
  Rows r = make_rows(n, 5);
  std::vector<double> out(n, 1.5);
  kernels::scalar_table().gauss_logpdf_accum(0.7, r.mu.data(), r.inv_sigma.data(), r.c0.data(),
                                             out.data(), n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = (0.7 - r.mu[i]) * r.inv_sigma[i];
    CHECK(out[i] == doctest::Approx(1.5 + r.c0[i] - 0.5 * d * d).epsilon(1e-14));
  }
}

TEST_CASE("active kernels agree with scalar reference") {
  for (std::size_t n : {std::size_t(1), std::size_t(3), std::size_t(8), std::size_t(17),
                        std::size_t(64), std::size_t(67), std::size_t(1000)}) {
    check_tables_agree(kernels::scalar_table(), kernels::active(), n);
  }
}

TEST_CASE("avx2 kernels agree with scalar when available") {
  const kernels::KernelTable* t = kernels::avx2_table();
  if (!kernels::avx2_available() || t == nullptr) return;
  for (std::size_t n = 1; n <= 40; ++n) check_tables_agree(kernels::scalar_table(), *t, n);
}

TEST_CASE("neon kernels agree with scalar when available") {
  const kernels::KernelTable* t = kernels::neon_table();
  if (!kernels::neon_available() || t == nullptr) return;
  for (std::size_t n = 1; n <= 40; ++n) check_tables_agree(kernels::scalar_table(), *t, n);
}

TEST_CASE("per-element results do not depend on array position") {
  const std::size_t n = 33;
  Rows r = make_rows(n, 21);
  std::vector<double> out(n, 0.0);
  const kernels::KernelTable& k = kernels::active();
  k.gauss_logpdf_accum(-0.3, r.mu.data(), r.inv_sigma.data(), r.c0.data(), out.data(), n);

  // reverse the rows; element values must travel with their row
  Rows rev = r;
  std::reverse(rev.mu.begin(), rev.mu.end());
  std::reverse(rev.inv_sigma.begin(), rev.inv_sigma.end());
  std::reverse(rev.c0.begin(), rev.c0.end());
  std::vector<double> out_rev(n, 0.0);
  k.gauss_logpdf_accum(-0.3, rev.mu.data(), rev.inv_sigma.data(), rev.c0.data(), out_rev.data(),
                       n);
  for (std::size_t i = 0; i < n; ++i) CHECK(out[i] == out_rev[n - 1 - i]);
}

TEST_CASE("max_reduce") {
  std::vector<double> v{-2.0, 7.5, 3.0, 7.5, -9.0};
  CHECK(kernels::active().max_reduce(v.data(), v.size()) == 7.5);
  CHECK(kernels::scalar_table().max_reduce(v.data(), 1) == -2.0);
  CHECK(kernels::active().max_reduce(v.data(), 0) ==
        -std::numeric_limits<double>::infinity());
}
