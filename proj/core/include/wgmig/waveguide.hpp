#pragma once

#include <vector>

#include "wgmig/errors.hpp"

namespace wgmig {

/// Planar acoustic waveguide with sound-soft walls at x = 0 and x = a.
///
/// Transverse eigenpairs:  phi_j(x) = sqrt(2/a) sin(pi j x / a),
///                         lambda_j = (pi j / a)^2.
/// Axial wavenumbers:      beta_j(w)^2 = k(w)^2 - lambda_j,  k = w / c0.
struct WaveguideSpec {
    double width = 1.0;        ///< transverse width a (length)
    double sound_speed = 1.0;  ///< background speed c0 (length/time)
    double omega0 = 0.0;       ///< carrier angular frequency (rad/time)

    /// Throws std::invalid_argument on non-positive parameters and
    /// NoPropagatingModesError when the carrier supports no mode.
    void validate() const;

    double wavenumber_at(double omega) const { return omega / sound_speed; }
    /// Carrier wavelength 2*pi*c0/omega0.
    double wavelength() const;
};

/// Number of propagating modes floor(w a / (pi c0)).
/// Throws NoPropagatingModesError when the count is zero.
int mode_count(double omega, const WaveguideSpec& spec);

/// Transverse eigenfunction phi_j evaluated at x in [0, a].
double mode_eval(int j, double x, const WaveguideSpec& spec);

/// Propagating-mode table at one frequency: eigenvalues, axial wavenumbers
/// and their frequency derivatives. Immutable once built; cheap to copy.
///
/// A mode exactly at cutoff (beta_j = 0) is excluded from the table since
/// its amplitude normalization 1/sqrt(beta_j) diverges.
class ModeBasis {
public:
    ModeBasis(const WaveguideSpec& spec, double omega);
    explicit ModeBasis(const WaveguideSpec& spec) : ModeBasis(spec, spec.omega0) {}

    const WaveguideSpec& spec() const { return spec_; }
    double omega() const { return omega_; }
    /// Bulk wavenumber k = omega / c0.
    double wavenumber_total() const { return k_; }
    double wavelength() const;

    /// Number of propagating modes with beta_j > 0.
    int count() const { return static_cast<int>(beta_.size()); }

    /// lambda_j, 1-based. Throws EvanescentModeError past the table.
    double eigenvalue(int j) const;
    /// beta_j, 1-based.
    double wavenumber(int j) const;
    /// d(beta_j)/d(omega) = omega / (c0^2 beta_j), 1-based.
    double wavenumber_derivative(int j) const;
    /// phi_j(x); x must lie in [0, a].
    double mode(int j, double x) const;

    const std::vector<double>& wavenumbers() const { return beta_; }
    const std::vector<double>& wavenumber_derivatives() const { return beta_prime_; }

private:
    WaveguideSpec spec_;
    double omega_ = 0.0;
    double k_ = 0.0;
    std::vector<double> lambda_;
    std::vector<double> beta_;
    std::vector<double> beta_prime_;

    void check_index(int j) const;
};

/// beta_j(omega); rejects cutoff (CutoffModeError) and evanescent
/// (EvanescentModeError) indices.
double wavenumber(int j, double omega, const WaveguideSpec& spec);

/// d(beta_j)/d(omega) under the same index rules as wavenumber().
double beta_prime(int j, double omega, const WaveguideSpec& spec);

} // namespace wgmig
