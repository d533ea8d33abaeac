#include "dismet/kernels.hpp"

#include <cmath>
#include <limits>

namespace dismet::kernels {

namespace {

constexpr double kA1 = 0.278393;
constexpr double kA2 = 0.230389;
constexpr double kA3 = 0.000972;
constexpr double kA4 = 0.078108;

void gauss_logpdf_accum_scalar(double z, const double* mu, const double* inv_sigma,
                               const double* c0, double* out, std::size_t n) {
  for (std::size_t r = 0; r < n; ++r) {
    double t = (z - mu[r]) * inv_sigma[r];
    out[r] += c0[r] - 0.5 * (t * t);
  }
}

double erf_poly_one(double x) {
  double ax = std::fabs(x);
  // Quartic rational approximation on [0, inf), extended to negative
  // arguments by odd symmetry. Absolute error stays below 5e-4.
  double d = 1.0 + ax * (kA1 + ax * (kA2 + ax * (kA3 + ax * kA4)));
  double d2 = d * d;
  double t = 1.0 / (d2 * d2);
  double v = 1.0 - t;
  return x < 0.0 ? -v : v;
}

void erf_poly_batch_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = erf_poly_one(x[i]);
}

double max_reduce_scalar(const double* data, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (data[i] > m) m = data[i];
  }
  return m;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{gauss_logpdf_accum_scalar, erf_poly_batch_scalar,
                                 max_reduce_scalar, "scalar"};
  return table;
}

}  // namespace dismet::kernels
