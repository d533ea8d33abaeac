#pragma once

#include <cstddef>

namespace dismet::kernels {

// Data-parallel inner loops. Each kernel has a scalar reference
// implementation and, where the target supports it, a vector variant
// selected once at startup. Contracts shared by all variants:
//
//   gauss_logpdf_accum:  out[r] += c0[r] - 0.5 * ((z - mu[r]) * inv_sigma[r])^2
//   erf_poly_batch:      out[i]  = quartic rational erf approximation of x[i]
//   max_reduce:          max of data[0..n), -inf when n == 0
//
// Every variant computes element r with arithmetic that does not depend on
// r's position in the array (vector tails use masked lanes, not a different
// formula), so callers may rely on per-element results being stable when
// rows are permuted. Scalar and vector variants agree to ~1e-12 relative
// (they round intermediate products differently); exact agreement is not
// part of the contract.

using GaussLogPdfAccumFn = void (*)(double z, const double* mu,
                                    const double* inv_sigma, const double* c0,
                                    double* out, std::size_t n);
using ErfPolyBatchFn = void (*)(const double* x, double* out, std::size_t n);
using MaxReduceFn = double (*)(const double* data, std::size_t n);

struct KernelTable {
  GaussLogPdfAccumFn gauss_logpdf_accum;
  ErfPolyBatchFn erf_poly_batch;
  MaxReduceFn max_reduce;
  const char* name;
};

/// Table picked at first use: DISMETRICS_SIMD=scalar|avx2|neon overrides,
/// otherwise the best variant the CPU supports.
const KernelTable& active();

const KernelTable& scalar_table();

bool avx2_available();
const KernelTable* avx2_table();  // nullptr when not built in

bool neon_available();
const KernelTable* neon_table();

}  // namespace dismet::kernels
