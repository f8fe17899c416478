#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wgmig/medium.hpp"
#include "wgmig/waveguide.hpp"

namespace wgmig {

/// Unitary transmission matrix of the random section, T(omega, L, 0).
/// matrix(j-1, l-1) converts launched mode l into received mode j across the
/// normalized distance L (physical extent L / epsilon^2).
struct PropagatorMatrix {
    double omega = 0.0;
    Eigen::MatrixXcd matrix;
    double distance = 0.0;  ///< normalized propagation distance L
    double epsilon = 0.0;

    int mode_count() const { return static_cast<int>(matrix.rows()); }
};

/// Point source in the plane z = 0.
struct SourceSpec {
    enum class Kind { time_harmonic, broadband };

    double position = 0.0;   ///< transverse coordinate x_s in (0, a)
    Kind kind = Kind::time_harmonic;
    double alpha = 1.5;      ///< bandwidth exponent, broadband only; in (1, 2)
    double bandwidth = 1.0;  ///< std of |f0_hat(h)|^2 in the baseband variable

    void validate(const WaveguideSpec& wg) const;
};

/// Max |(T^H T - I)_jl|; integration keeps this at roundoff level.
double unitarity_defect(const Eigen::MatrixXcd& t);

/// Integrates dT/dz = eps^{-1} H(z/eps^2) T up to normalized distance L with
/// an exponential midpoint rule: per step the skew-Hermitian increment is the
/// exact integral of the oscillatory phase with the coupling frozen at the
/// step midpoint, followed by a matrix exponential. The result is unitary up
/// to the exponential evaluation error.
///
/// `step` is the physical step size; it must not exceed
/// min(ell_z, shortest beat length)/8 (StabilityError otherwise) and the
/// coupling realization must cover the physical extent L/eps^2.
/// Throws IntegrationFailure if the final unitarity defect exceeds 1e-8.
PropagatorMatrix propagate(double omega, const CouplingProcess& coupling, double distance,
                           double epsilon, double step);

/// Same integration, returning snapshots of T at each requested normalized
/// distance (ascending). One pass over the medium.
std::vector<PropagatorMatrix> propagate_checkpoints(double omega,
                                                    const CouplingProcess& coupling,
                                                    std::span<const double> distances,
                                                    double epsilon, double step);

/// Modal amplitudes launched by the source at z = 0:
///   a_l(omega, 0) = phi_l(x_s) / (2 i sqrt(beta_l)),
/// with the source spectrum normalized to one at the evaluation frequency.
Eigen::VectorXcd initial_amplitudes(const SourceSpec& source, double omega,
                                    const ModeBasis& basis);

/// a(omega, L) = T a(omega, 0).
Eigen::VectorXcd transmitted_amplitudes(const PropagatorMatrix& t, const Eigen::VectorXcd& a0);

namespace detail {

/// Coupled-mode generator H(zeta) with
///   H_jl = (i k^2 / 2) C_jl(zeta) exp(i (beta_l - beta_j) zeta) / sqrt(beta_j beta_l).
/// Exactly skew-Hermitian for symmetric C.
Eigen::MatrixXcd mode_coupling_generator(const CouplingProcess& coupling, double omega,
                                         double zeta);

/// Matrix exponential of a skew-Hermitian matrix by diagonal Pade with
/// scaling and squaring; unitary by construction.
Eigen::MatrixXcd expm_skew_hermitian(const Eigen::MatrixXcd& a);

} // namespace detail

} // namespace wgmig
