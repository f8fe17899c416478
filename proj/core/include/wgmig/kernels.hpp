#pragma once

#include <complex>

#include "wgmig/waveguide.hpp"

namespace wgmig {

/// Beta-weighted mean mode intensity, (1/N) sum_n beta_n^order phi_n(x)^2.
/// Orders -1, 0, 1 appear in the closed-form image statistics.
double intensity_moment(const ModeBasis& basis, int order, double x);

/// Migration kernel
///   (1/N) sum_n phi_n(x_r) phi_n(x_s) exp(i beta_n (z_r - z_s));
/// equals intensity_moment(basis, 0, x) when both points coincide.
std::complex<double> migration_kernel(const ModeBasis& basis, double x_search, double z_search,
                                      double x_ref, double z_ref);

/// Continuum limits of the intensity moments for N >> 1:
/// order -1: pi / (2 a k), order 0: 1 / a, order 1: pi k / (4 a).
double intensity_moment_continuum(const ModeBasis& basis, int order);

} // namespace wgmig
