#pragma once

#include <string>

#include "dismet/types.hpp"

namespace dismet {

// Posterior files come in two interchangeable formats.
//
// CSV: header "mu_0,sigma_0,...,mu_{L-1},sigma_{L-1}", one row per sample.
// Binary: magic "DMET", u32 version (= 1), u64 n_samples, u32 n_latents,
//         then n_samples*n_latents little-endian f64 means followed by the
//         same number of stds.
//
// Values are written with shortest-round-trip formatting, so save followed
// by load reproduces a PosteriorSet bit for bit in either format.
// load_posteriors sniffs the magic bytes, the extension does not matter.

PosteriorSet load_posteriors(const std::string& path);
PosteriorSet load_posteriors_csv(const std::string& path);
PosteriorSet load_posteriors_binary(const std::string& path);
void save_posteriors_csv(const PosteriorSet& ps, const std::string& path);
void save_posteriors_binary(const PosteriorSet& ps, const std::string& path);

// Factor files: optional first line "#card=c0,c1,..." pinning cardinalities,
// then header "y_0,...,y_{K-1}" and one row per sample. Integer columns are
// categorical labels; columns containing non-integer values are quantized
// onto `factor_bins` equal-width bins over their observed range (flagged in
// FactorTable::quantized_from_continuous).

FactorTable load_factors(const std::string& path, std::size_t factor_bins = 20);
void save_factors_csv(const FactorTable& ft, const std::string& path);

/// Soft-label companion file for one factor: header "p_0,...,p_{C-1}",
/// one row-stochastic row per sample. Attached via FactorTable::attach_soft.
void load_soft_labels(FactorTable& ft, std::size_t k, const std::string& path);

}  // namespace dismet
