#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "wgmig/fields.hpp"
#include "wgmig/kernels.hpp"
#include "wgmig/propagator.hpp"
#include "wgmig/waveguide.hpp"

namespace wgmig {

/// Retained components of the cross correlation. The secondary-secondary
/// product is O(sigma_r^2) and enters only through `total`.
enum class Component { pp, ps, sp, total };

/// Cross correlation of two time-harmonic field values at lag tau,
/// (1/T) int conj(p(t, x1)) p(t + tau, x2) dt = e^{-i omega tau} conj(p1) p2.
std::complex<double> correlation_timeharmonic(std::complex<double> p1, std::complex<double> p2,
                                              double omega, double tau);

/// Modal cross-covariance stack of one realization. Each frequency sample
/// holds K_jl = conj(p_j) p_l per component; the lag dependence is the
/// explicit factor e^{-i omega tau}, so correlations are evaluated exactly
/// at any requested lag. Means over realizations live in the same type.
class ModalCorrelation {
public:
    struct Sample {
        double h = 0.0;       ///< baseband frequency offset
        double weight = 1.0;  ///< quadrature weight, sums to ~1 over the band
        double omega = 0.0;   ///< omega0 + eps^alpha h
        Eigen::MatrixXcd pp, ps, sp, total;
    };

    ModalCorrelation() = default;
    ModalCorrelation(double omega0, std::vector<Sample> samples);

    double omega0() const { return omega0_; }
    int mode_count() const;
    const std::vector<Sample>& samples() const { return samples_; }
    std::vector<Sample>& samples() { return samples_; }
    bool broadband() const { return samples_.size() > 1; }

    /// C^{jl}(tau) = sum_h w_h K^h_jl e^{-i omega_h tau}.
    Eigen::MatrixXcd modal_lag(double tau, Component which = Component::total) const;

    /// C(tau, x1, x2) materialized from the mode sums.
    std::complex<double> receiver_value(const ModeBasis& basis, double tau, double x1, double x2,
                                        Component which = Component::total) const;

    const Eigen::MatrixXcd& component(std::size_t sample, Component which) const;

private:
    double omega0_ = 0.0;
    std::vector<Sample> samples_;
};

/// Single-frequency covariance stack from one realization's modal data.
ModalCorrelation make_modal_correlation(const ModalField& primary, const ModalField& secondary);

/// Receiver-domain correlation matrices (C_pp, C_ps, C_sp) on the array at
/// lag tau, assembled from the modal data.
struct CorrelationMatrices {
    Eigen::MatrixXcd pp, ps, sp;
};
CorrelationMatrices correlation_components(const ModalField& primary, const ModalField& secondary,
                                           const ArrayGeometry& geometry, const ModeBasis& basis,
                                           double tau);

/// Modal projection C^{jl}(tau) of a receiver-sampled correlation by
/// tensorized quadrature. Requires a full-aperture geometry; limited
/// apertures migrate through the limited-aperture imaging functional.
Eigen::MatrixXcd modal_correlation(const Eigen::MatrixXcd& receiver_correlation,
                                   const ArrayGeometry& geometry, const ModeBasis& basis);

/// Baseband sampling of a broadband source: Gauss-Legendre nodes h_i over
/// the envelope support with weights w_i |f0_hat(h_i)|^2 / (2 pi); the
/// weights integrate the unit-energy envelope to ~1.
struct BroadbandSpec {
    double alpha = 1.5;
    double epsilon = 0.0;
    std::vector<double> h_nodes;
    std::vector<double> weights;

    /// omega at node i.
    double frequency(double omega0, std::size_t i) const;
    /// Gaussian envelope with std `source.bandwidth`, >= 64 nodes spanning
    /// +-span_sigmas standard deviations.
    static BroadbandSpec gaussian(const SourceSpec& source, double epsilon,
                                  std::size_t nodes = 64, double span_sigmas = 4.0);
    void validate() const;
};

/// Per-frequency modal data supplier: returns (primary, secondary) at omega.
using ModalDataFactory =
    std::function<std::pair<ModalField, ModalField>(double omega)>;

/// Broadband covariance stack: one factory call per baseband node. The mode
/// count must not change across the band (RegimeViolationError otherwise).
ModalCorrelation broadband_modal_correlation(const BroadbandSpec& spec, double omega0,
                                             const ModalDataFactory& factory);

/// Broadband cross correlation at (tau, x1, x2): the h-integral of the
/// time-harmonic expression with frequency-dependent propagators.
std::complex<double> broadband_correlation(const BroadbandSpec& spec, double omega0,
                                           const ModalDataFactory& factory,
                                           const ModeBasis& basis, double tau, double x1,
                                           double x2, Component which = Component::total);

/// Closed-form expectations of the correlation components in the
/// equipartition regime L >> L_equip; usable directly as a covariance stack
/// for the imaging oracles.
ModalCorrelation expected_modal_correlation(const ModeBasis& basis, double source_position,
                                            const Reflector& reflector);

/// E[C_ab](tau, x1, x2) materialized on receiver pairs.
std::complex<double> expected_correlation_value(const ModeBasis& basis, double source_position,
                                                const Reflector& reflector, double tau, double x1,
                                                double x2, Component which);

} // namespace wgmig
