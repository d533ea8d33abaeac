#include "dismet/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <limits>

namespace dismet::kernels {

namespace {

constexpr double kA1 = 0.278393;
constexpr double kA2 = 0.230389;
constexpr double kA3 = 0.000972;
constexpr double kA4 = 0.078108;

// Odd-length tails are one scalar element; they use std::fma so the
// arithmetic matches the fused vector lanes bit for bit.

void gauss_logpdf_accum_neon(double z, const double* mu, const double* inv_sigma,
                             const double* c0, double* out, std::size_t n) {
  const float64x2_t vz = vdupq_n_f64(z);
  const float64x2_t neg_half = vdupq_n_f64(-0.5);
  std::size_t r = 0;
  for (; r + 2 <= n; r += 2) {
    float64x2_t t = vmulq_f64(vsubq_f64(vz, vld1q_f64(mu + r)), vld1q_f64(inv_sigma + r));
    float64x2_t contrib = vfmaq_f64(vld1q_f64(c0 + r), vmulq_f64(t, t), neg_half);
    vst1q_f64(out + r, vaddq_f64(vld1q_f64(out + r), contrib));
  }
  if (r < n) {
    double t = (z - mu[r]) * inv_sigma[r];
    out[r] += std::fma(t * t, -0.5, c0[r]);
  }
}

inline float64x2_t erf_poly_pair(float64x2_t x) {
  const float64x2_t one = vdupq_n_f64(1.0);
  float64x2_t ax = vabsq_f64(x);
  float64x2_t d = vfmaq_f64(vdupq_n_f64(kA3), ax, vdupq_n_f64(kA4));
  d = vfmaq_f64(vdupq_n_f64(kA2), ax, d);
  d = vfmaq_f64(vdupq_n_f64(kA1), ax, d);
  d = vfmaq_f64(one, ax, d);
  float64x2_t d2 = vmulq_f64(d, d);
  float64x2_t v = vsubq_f64(one, vdivq_f64(one, vmulq_f64(d2, d2)));
  uint64x2_t sign = vandq_u64(vreinterpretq_u64_f64(x), vdupq_n_u64(0x8000000000000000ULL));
  return vreinterpretq_f64_u64(vorrq_u64(vreinterpretq_u64_f64(v), sign));
}

void erf_poly_batch_neon(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, erf_poly_pair(vld1q_f64(x + i)));
  if (i < n) {
    double ax = std::fabs(x[i]);
    double d = std::fma(ax, kA4, kA3);
    d = std::fma(ax, d, kA2);
    d = std::fma(ax, d, kA1);
    d = std::fma(ax, d, 1.0);
    double d2 = d * d;
    out[i] = std::copysign(1.0 - 1.0 / (d2 * d2), x[i]);
  }
}

double max_reduce_neon(const double* data, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 2) {
    float64x2_t vm = vld1q_f64(data);
    for (i = 2; i + 2 <= n; i += 2) vm = vmaxq_f64(vm, vld1q_f64(data + i));
    m = vmaxvq_f64(vm);
  }
  for (; i < n; ++i) {
    if (data[i] > m) m = data[i];
  }
  return m;
}

}  // namespace

const KernelTable* neon_table() {
  static const KernelTable table{gauss_logpdf_accum_neon, erf_poly_batch_neon,
                                 max_reduce_neon, "neon"};
  return &table;
}

}  // namespace dismet::kernels

#endif  // __aarch64__
