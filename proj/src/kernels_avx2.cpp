#include "dismet/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstdint>
#include <limits>

namespace dismet::kernels {

namespace {

constexpr double kA1 = 0.278393;
constexpr double kA2 = 0.230389;
constexpr double kA3 = 0.000972;
constexpr double kA4 = 0.078108;

// First `rem` lanes active. Tails reuse the vector arithmetic through these
// masks so an element is computed identically at any array position.
inline __m256i tail_mask(std::size_t rem) {
  alignas(32) static const std::int64_t bits[8] = {-1, -1, -1, -1, 0, 0, 0, 0};
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + (4 - rem)));
}

inline __m256d gauss_body(__m256d vz, __m256d vmu, __m256d vis, __m256d vc0,
                          __m256d vout) {
  const __m256d neg_half = _mm256_set1_pd(-0.5);
  __m256d t = _mm256_mul_pd(_mm256_sub_pd(vz, vmu), vis);
  __m256d sq = _mm256_mul_pd(t, t);
  __m256d contrib = _mm256_fmadd_pd(sq, neg_half, vc0);
  return _mm256_add_pd(vout, contrib);
}

void gauss_logpdf_accum_avx2(double z, const double* mu, const double* inv_sigma,
                             const double* c0, double* out, std::size_t n) {
  const __m256d vz = _mm256_set1_pd(z);
  std::size_t r = 0;
  for (; r + 4 <= n; r += 4) {
    __m256d res = gauss_body(vz, _mm256_loadu_pd(mu + r), _mm256_loadu_pd(inv_sigma + r),
                             _mm256_loadu_pd(c0 + r), _mm256_loadu_pd(out + r));
    _mm256_storeu_pd(out + r, res);
  }
  std::size_t rem = n - r;
  if (rem) {
    __m256i m = tail_mask(rem);
    __m256d res = gauss_body(vz, _mm256_maskload_pd(mu + r, m),
                             _mm256_maskload_pd(inv_sigma + r, m),
                             _mm256_maskload_pd(c0 + r, m),
                             _mm256_maskload_pd(out + r, m));
    _mm256_maskstore_pd(out + r, m, res);
  }
}

inline __m256d erf_poly_vec(__m256d x) {
  const __m256d sign_bit = _mm256_set1_pd(-0.0);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d ax = _mm256_andnot_pd(sign_bit, x);
  __m256d d = _mm256_fmadd_pd(ax, _mm256_set1_pd(kA4), _mm256_set1_pd(kA3));
  d = _mm256_fmadd_pd(ax, d, _mm256_set1_pd(kA2));
  d = _mm256_fmadd_pd(ax, d, _mm256_set1_pd(kA1));
  d = _mm256_fmadd_pd(ax, d, one);
  __m256d d2 = _mm256_mul_pd(d, d);
  __m256d d4 = _mm256_mul_pd(d2, d2);
  __m256d v = _mm256_sub_pd(one, _mm256_div_pd(one, d4));
  return _mm256_or_pd(v, _mm256_and_pd(sign_bit, x));
}

void erf_poly_batch_avx2(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, erf_poly_vec(_mm256_loadu_pd(x + i)));
  }
  std::size_t rem = n - i;
  if (rem) {
    __m256i m = tail_mask(rem);
    _mm256_maskstore_pd(out + i, m, erf_poly_vec(_mm256_maskload_pd(x + i, m)));
  }
}

double max_reduce_avx2(const double* data, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d vm = _mm256_loadu_pd(data);
    for (i = 4; i + 4 <= n; i += 4) vm = _mm256_max_pd(vm, _mm256_loadu_pd(data + i));
    __m128d folded = _mm_max_pd(_mm256_castpd256_pd128(vm), _mm256_extractf128_pd(vm, 1));
    folded = _mm_max_sd(folded, _mm_unpackhi_pd(folded, folded));
    m = _mm_cvtsd_f64(folded);
  }
  for (; i < n; ++i) {
    if (data[i] > m) m = data[i];
  }
  return m;
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{gauss_logpdf_accum_avx2, erf_poly_batch_avx2,
                                 max_reduce_avx2, "avx2"};
  return &table;
}

}  // namespace dismet::kernels

#endif  // x86_64
