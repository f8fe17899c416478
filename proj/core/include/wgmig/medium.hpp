#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wgmig/errors.hpp"
#include "wgmig/waveguide.hpp"

namespace wgmig {

/// Correlation model of the sound-speed fluctuation field nu(x, z).
/// The transverse kernel is Gaussian in both cases.
enum class CorrelationKernel {
    gaussian,           ///< exp(-u^2 / (2 l^2)) in x and z
    exponential_axial,  ///< exp(-|u| / l_z) in z, Gaussian in x
};

std::string to_string(CorrelationKernel k);

/// Statistical description of one random medium.
///
/// nu is a mean-zero stationary Gaussian field with separable covariance
///   E[nu(x,z) nu(x',z')] = sigma_nu^2 R_x(x-x') R_z(z-z'),
/// and the speed of sound obeys 1/c^2 = (1 + epsilon nu) / c0^2 inside the
/// randomly perturbed section.
struct MediumSpec {
    double epsilon = 0.05;   ///< relative fluctuation amplitude (dimensionless)
    double ell_z = 0.0;      ///< axial correlation length
    double ell_x = 0.0;      ///< transverse correlation length
    CorrelationKernel kernel = CorrelationKernel::gaussian;
    double sigma_nu = 1.0;   ///< standard deviation of nu
    std::uint64_t seed = 0;  ///< master RNG seed

    /// Hard errors only (non-positive lengths, epsilon outside (0, 0.5]).
    void validate() const;
    /// Soft regime warnings: epsilon > 0.2, correlation lengths far from the
    /// carrier wavelength.
    std::vector<std::string> warnings(const WaveguideSpec& wg) const;
};

/// One realization of the modal coupling processes
///   C_jl(z) = int_0^a phi_j(x) phi_l(x) nu(x, z) dx
/// sampled on a uniform axial grid. Stored compactly through the cosine
/// moments c_m(z) = int_0^a cos(pi m x / a) nu(x, z) dx, m = 0..2N, from
/// which C_jl = (c_|j-l| - c_{j+l}) / a; this keeps C_jl = C_lj exact.
class CouplingProcess {
public:
    CouplingProcess(WaveguideSpec wg, int n_modes, double z_step, double ell_z,
                    Eigen::MatrixXd cosine_moments);

    int mode_count() const { return n_modes_; }
    const WaveguideSpec& waveguide() const { return wg_; }
    double z_step() const { return z_step_; }
    double z_extent() const { return z_step_ * static_cast<double>(samples() - 1); }
    double axial_correlation_length() const { return ell_z_; }
    std::size_t samples() const { return static_cast<std::size_t>(moments_.cols()); }
    double z_at(std::size_t iz) const { return z_step_ * static_cast<double>(iz); }
    std::vector<double> grid_z() const;

    /// C_jl at grid sample iz; 1-based mode indices.
    double value(std::size_t iz, int j, int l) const;
    /// Full symmetric coupling matrix at one grid sample.
    Eigen::MatrixXd matrix_at(std::size_t iz) const;

    /// Linear interpolation of the cosine moments at axial position z;
    /// `out` must hold 2N+1 values. z is clamped to the sampled range.
    void moments_at(double z, double* out) const;

    /// Raw moment table (2N+1 rows, one column per axial sample).
    const Eigen::MatrixXd& cosine_moments() const { return moments_; }

private:
    WaveguideSpec wg_;
    int n_modes_ = 0;
    double z_step_ = 0.0;
    double ell_z_ = 0.0;
    Eigen::MatrixXd moments_;
};

/// Samples realizations of the coupling processes for one scenario.
/// Construction precomputes grids, spectra and FFT plans; sample() is safe to
/// call concurrently and is a pure function of the realization index.
class MediumSampler {
public:
    /// Grid steps default to dx = min(ell_x, lambda)/8 and dz = ell_z/4.
    /// Coarser explicit overrides raise ResolutionError.
    MediumSampler(const MediumSpec& spec, const ModeBasis& basis, double z_extent,
                  std::optional<double> dx = std::nullopt,
                  std::optional<double> dz = std::nullopt);

    CouplingProcess sample(std::uint64_t realization) const;

    double dx() const { return dx_; }
    double dz() const { return dz_; }
    const MediumSpec& spec() const { return spec_; }

private:
    MediumSpec spec_;
    WaveguideSpec wg_;
    int n_modes_ = 0;
    double z_extent_ = 0.0;
    double dx_ = 0.0, dz_ = 0.0;
    std::size_t nx_ = 0, nz_ = 0;      // physical grid points
    std::size_t px_ = 0, pz_ = 0;      // padded FFT sizes
    std::vector<double> spectrum_;      // px*pz nonnegative spectral weights
    Eigen::MatrixXd cos_table_;         // (2N+1) x nx quadrature rows
};

/// One-shot convenience wrapper around MediumSampler.
CouplingProcess sample_medium(const MediumSpec& spec, const ModeBasis& basis,
                              double z_extent, std::uint64_t realization);

/// Axial power spectral density of the unit-variance kernel,
/// integral of R_z(u) e^{-i kappa u} du.
double axial_spectrum(const MediumSpec& spec, double kappa);

/// Transverse overlap factor
///   S_jl = sigma_nu^2 * int int (phi_j phi_l)(x) (phi_j phi_l)(x') R_x(x - x') dx dx',
/// evaluated through the closed-form Fourier transform of phi_j phi_l.
double coupling_transverse_factor(const MediumSpec& spec, const ModeBasis& basis, int j, int l);

/// Power spectral density of C_jl at axial wavenumber kappa:
/// S_jl * axial_spectrum(kappa). Separable kernels only.
double coupling_psd(const MediumSpec& spec, const ModeBasis& basis, int j, int l, double kappa);

} // namespace wgmig
