#include "dismet/special_functions.hpp"

#include <cmath>

#include "dismet/errors.hpp"
#include "dismet/kernels.hpp"

namespace dismet {

double erf_approx(double x) {
  double out;
  kernels::scalar_table().erf_poly_batch(&x, &out, 1);
  return out;
}

void erf_approx_batch(const double* x, double* out, std::size_t n) {
  kernels::active().erf_poly_batch(x, out, n);
}

double erf_value(double x, ErfImpl impl) {
  return impl == ErfImpl::Precise ? std::erf(x) : erf_approx(x);
}

double gaussian_mass(double mu, double sigma, double a, double b, ErfImpl impl) {
  if (!std::isfinite(mu) || !std::isfinite(sigma) || sigma <= 0.0) {
    throw Error(ErrorCode::InvalidValue, "gaussian_mass requires finite mu and sigma > 0");
  }
  if (!std::isfinite(a) || !std::isfinite(b) || a > b) {
    throw Error(ErrorCode::InvalidValue, "gaussian_mass requires a finite interval with a <= b");
  }
  constexpr double inv_sqrt2 = 0.70710678118654752440084436210485;
  double scale = inv_sqrt2 / sigma;
  double mass = 0.5 * (erf_value((b - mu) * scale, impl) - erf_value((a - mu) * scale, impl));
  // The polynomial's pointwise error can push a tiny interval negative.
  return mass < 0.0 ? 0.0 : mass;
}

}  // namespace dismet
