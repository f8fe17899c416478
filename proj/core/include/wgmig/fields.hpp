#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wgmig/propagator.hpp"
#include "wgmig/waveguide.hpp"

namespace wgmig {

/// Point reflector behind the receiver array.
struct Reflector {
    double position = 0.0;  ///< transverse coordinate x_r in (0, a)
    double range = 0.0;     ///< axial offset z_r from the array plane (length)
    double strength = 0.0;  ///< scattering strength sigma_r = |Omega_r| / c_r^2 (time^2)

    void validate(const WaveguideSpec& wg) const;
    /// Regime warnings: range below 5 wavelengths, range not small against
    /// the random-section scale 1/epsilon^2.
    std::vector<std::string> warnings(const ModeBasis& basis, double epsilon) const;
};

/// Receiver line in the array plane.
struct ArrayGeometry {
    double lo = 0.0;  ///< aperture start a1
    double hi = 0.0;  ///< aperture end a2
    std::vector<double> positions;  ///< sorted receiver coordinates, uniform

    /// Uniform receivers over [a1, a2] with spacing <= max_spacing and an
    /// odd point count (composite Simpson quadrature applies directly).
    static ArrayGeometry interval(double a1, double a2, double max_spacing);
    static ArrayGeometry full(const WaveguideSpec& wg, double max_spacing);

    void validate(const WaveguideSpec& wg) const;
    bool covers_full_section(const WaveguideSpec& wg, double tol = 1e-9) const;
    double spacing() const;
    /// Simpson weights matching `positions`.
    std::vector<double> quadrature_weights() const;
};

/// Modal amplitudes of one field component at the receiver-array plane,
/// with the phase convention needed to continue the field off the plane.
struct ModalField {
    enum class Direction { rightgoing, leftgoing };

    double omega = 0.0;
    Direction direction = Direction::rightgoing;
    double array_plane = 0.0;  ///< physical z of the array, L / epsilon^2
    double valid_from = 0.0;   ///< axial validity window for field_at
    double valid_to = 0.0;
    Eigen::VectorXcd amplitude;  ///< p_j at the array plane

    int mode_count() const { return static_cast<int>(amplitude.size()); }
};

/// Primary (source-transmitted) modal amplitudes at the array plane:
///   p_j = e^{i beta_j L~} / (2 i sqrt(beta_j)) sum_l T_jl phi_l(x_s) / sqrt(beta_l).
ModalField primary_modal_data(const PropagatorMatrix& t, const SourceSpec& source,
                              const ModeBasis& basis);

/// Illumination of the reflector by the primary field,
///   q = sum_{l,m} (omega^2 sigma_r / (4 sqrt(beta_m beta_l))) T_lm
///       phi_l(x_r) phi_m(x_s) e^{i beta_l (L~ + z_r)}.
std::complex<double> reflector_illumination(const PropagatorMatrix& t, const SourceSpec& source,
                                            const Reflector& reflector, const ModeBasis& basis);

/// Born-scattered (secondary) modal amplitudes at the array plane:
///   p_j = phi_j(x_r) e^{i beta_j z_r} q / beta_j,
/// a left-going wave valid between the array and the reflector.
ModalField secondary_modal_data(const PropagatorMatrix& t, const SourceSpec& source,
                                const Reflector& reflector, const ModeBasis& basis);

/// Field value at (x, z) reconstructed from modal data, each mode continued
/// with its e^{+-i beta_j (z - L~)} phase. Throws std::out_of_range outside
/// the field's validity window or the transverse section.
std::complex<double> field_at(double x, double z, const ModalField& field,
                              const ModeBasis& basis);

} // namespace wgmig
