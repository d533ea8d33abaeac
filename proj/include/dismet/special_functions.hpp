#pragma once

#include <cstddef>

namespace dismet {

/// Which error-function implementation integrates Gaussian bin masses.
/// Precise is the platform erf; Polynomial is the quartic rational
/// approximation (absolute error below 5e-4) that also has vector variants.
enum class ErfImpl { Precise, Polynomial };

/// Quartic rational erf approximation, odd-symmetric, max error 5e-4.
double erf_approx(double x);

/// Batch form routed through the active kernel table.
void erf_approx_batch(const double* x, double* out, std::size_t n);

double erf_value(double x, ErfImpl impl);

/// Mass of N(mu, sigma^2) on the interval [a, b].
/// Throws InvalidValue for non-finite arguments, sigma <= 0, or a > b.
double gaussian_mass(double mu, double sigma, double a, double b,
                     ErfImpl impl = ErfImpl::Precise);

}  // namespace dismet
