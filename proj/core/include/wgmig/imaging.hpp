#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wgmig/correlation.hpp"
#include "wgmig/fields.hpp"
#include "wgmig/kernels.hpp"
#include "wgmig/waveguide.hpp"

namespace wgmig {

/// Search grid for the migration functionals. z is measured from the array
/// plane towards the reflector.
struct ImageGridSpec {
    std::vector<double> x;
    std::vector<double> z;

    static ImageGridSpec centered(double x0, double z0, double half_span_x, double half_span_z,
                                  double step);
    std::size_t nodes() const { return x.size() * z.size(); }
};

struct ImagePeak {
    double x = 0.0;
    double z = 0.0;
    double value = 0.0;
    std::size_t ix = 0;
    std::size_t iz = 0;
};

/// Migrated image over a search grid. `values` holds the functional's real
/// output convention, `magnitude` the complex magnitude channel.
struct ImageGrid {
    ImageGridSpec grid;
    std::string tag;  ///< "KM", "FA" or "LA"
    Eigen::MatrixXd values;     ///< indexed (ix, iz)
    Eigen::MatrixXd magnitude;  ///< same layout

    ImagePeak argmax_abs() const;
    ImagePeak argmax() const;
};

/// Kirchhoff migration of the modal array data at one frequency:
///   (1/N) sum_j beta_j phi_j(x) e^{-i beta_j z} p_j.
std::complex<double> kirchhoff_value(const Eigen::VectorXcd& modal_data, const ModeBasis& basis,
                                     double x, double z);
ImageGrid kirchhoff_image(const Eigen::VectorXcd& modal_data, const ModeBasis& basis,
                          const ImageGridSpec& grid);

/// Aperture Gram matrix int_A phi_q phi_j dx by Simpson quadrature over the
/// receiver samples.
Eigen::MatrixXd aperture_gram(const ArrayGeometry& geometry, const ModeBasis& basis);
/// Same integral in closed form (test oracle for the quadrature path).
Eigen::MatrixXd aperture_gram_exact(double a1, double a2, const ModeBasis& basis);

/// Migration of modal cross correlations. Holds per-frequency effective
/// covariances so an image evaluation costs O(N^2) per node and frequency;
/// the correlation is read at the exact lags +-(z / omega0)(beta_j + beta_l).
class CorrelationImager {
public:
    /// Full-aperture functional: beta_j beta_l weights on the exact modal
    /// correlation components.
    static CorrelationImager full_aperture(const ModalCorrelation& corr, const ModeBasis& basis,
                                           Component which = Component::total);

    /// Limited-aperture functional: (Delta + k^2) applied analytically in
    /// the mode domain (factor beta_j^2 per mode) and the aperture double
    /// integral carried out by quadrature over the receiver samples.
    static CorrelationImager limited_aperture(const ModalCorrelation& corr,
                                              const ArrayGeometry& geometry,
                                              const ModeBasis& basis,
                                              Component which = Component::total);

    double value(double x, double z) const;
    ImageGrid image(const ImageGridSpec& grid) const;

private:
    ModeBasis basis_;
    std::string tag_;
    bool beta_weight_ = true;  // multiply search-side weights by beta_j
    double omega0_ = 0.0;
    std::vector<double> omega_;
    std::vector<double> weight_;
    std::vector<Eigen::MatrixXcd> effective_;

    explicit CorrelationImager(ModeBasis basis) : basis_(std::move(basis)) {}
};

/// Transverse point spread profile pi^2 J1(xi)^2 / xi^2; value pi^2/4 at 0,
/// first zero at the first zero of J1.
double cross_range_psf(double xi);
/// Axial point spread profile
///   pi^2 J1'(eta)^2 - [int cos^2 t sin(eta cos t) dt]^2; value pi^2/4 at 0.
double range_psf(double eta);

/// int_{-pi/2}^{pi/2} cos t e^{i(eta cos t + xi sin t)} dt.
std::complex<double> aperture_angle_integral_cos(double xi, double eta);
/// Same with cos^2 t (limited-aperture weighting).
std::complex<double> aperture_angle_integral_cos2(double xi, double eta);

/// Closed-form mean of the full-aperture functional in the equipartition
/// regime (mode sums, finite N): background term plus the two migration
/// kernel squares.
double expected_full_aperture_value(const ModeBasis& basis, double source_position,
                                    const Reflector& reflector, double x, double z);
ImageGrid expected_full_aperture_image(const ModeBasis& basis, double source_position,
                                       const Reflector& reflector, const ImageGridSpec& grid);

/// Continuum (N >> 1) approximation of the mean full-aperture image as a
/// function of the normalized offsets xi = k (x_r - x), eta = k (z_r - z).
double expected_full_aperture_continuum(const ModeBasis& basis, double strength, double xi,
                                        double eta);
/// Mean peak amplitude in the continuum approximation,
/// omega0^2 sigma_r pi / (8 a^3 k).
double peak_amplitude_continuum(const ModeBasis& basis, double strength);

/// Continuum mean of the limited-aperture functional for a centered array
/// of width w and a centered reflector, at normalized offsets (xi, eta).
double expected_limited_aperture_continuum(const ModeBasis& basis, double strength,
                                           double aperture_width, double xi, double eta);

/// First zero crossings of a sampled profile on both sides of a peak, by
/// linear interpolation; returns the mean half-width. Throws Error when no
/// crossing lies inside the sampled window.
double first_zero_half_width(const std::vector<double>& axis, const std::vector<double>& values,
                             std::size_t peak_index);

} // namespace wgmig
