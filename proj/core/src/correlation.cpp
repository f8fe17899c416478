#include "wgmig/correlation.hpp"

#include <cmath>
#include <stdexcept>

#include "wgmig/errors.hpp"
#include "wgmig/quadrature.hpp"

namespace wgmig {

using cplx = std::complex<double>;

namespace {
constexpr double kPi = 3.14159265358979323846;

Eigen::VectorXd mode_values(const ModeBasis& basis, double x) {
    Eigen::VectorXd phi(basis.count());
    for (int j = 1; j <= basis.count(); ++j) phi(j - 1) = basis.mode(j, x);
    return phi;
}
} // namespace

std::complex<double> correlation_timeharmonic(std::complex<double> p1, std::complex<double> p2,
                                              double omega, double tau) {
    return std::polar(1.0, -omega * tau) * std::conj(p1) * p2;
}

ModalCorrelation::ModalCorrelation(double omega0, std::vector<Sample> samples)
    : omega0_(omega0), samples_(std::move(samples)) {
    if (samples_.empty())
        throw std::invalid_argument("ModalCorrelation: need at least one frequency sample");
}

int ModalCorrelation::mode_count() const {
    return samples_.empty() ? 0 : static_cast<int>(samples_.front().total.rows());
}

const Eigen::MatrixXcd& ModalCorrelation::component(std::size_t sample, Component which) const {
    const Sample& s = samples_.at(sample);
    switch (which) {
        case Component::pp: return s.pp;
        case Component::ps: return s.ps;
        case Component::sp: return s.sp;
        case Component::total: return s.total;
    }
    throw std::logic_error("unreachable");
}

Eigen::MatrixXcd ModalCorrelation::modal_lag(double tau, Component which) const {
    const int n = mode_count();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t s = 0; s < samples_.size(); ++s)
        out += samples_[s].weight * std::polar(1.0, -samples_[s].omega * tau) *
               component(s, which);
    return out;
}

std::complex<double> ModalCorrelation::receiver_value(const ModeBasis& basis, double tau,
                                                      double x1, double x2,
                                                      Component which) const {
    const Eigen::VectorXcd phi1 = mode_values(basis, x1).cast<cplx>();
    const Eigen::VectorXcd phi2 = mode_values(basis, x2).cast<cplx>();
    cplx value = 0.0;
    for (std::size_t s = 0; s < samples_.size(); ++s) {
        const cplx quad = (phi1.transpose() * component(s, which) * phi2).value();
        value += samples_[s].weight * std::polar(1.0, -samples_[s].omega * tau) * quad;
    }
    return value;
}

ModalCorrelation make_modal_correlation(const ModalField& primary, const ModalField& secondary) {
    if (primary.mode_count() != secondary.mode_count())
        throw std::invalid_argument("make_modal_correlation: mode count mismatch");
    if (primary.omega != secondary.omega)
        throw std::invalid_argument("make_modal_correlation: frequency mismatch");
    ModalCorrelation::Sample s;
    s.h = 0.0;
    s.weight = 1.0;
    s.omega = primary.omega;
    const Eigen::VectorXcd& p = primary.amplitude;
    const Eigen::VectorXcd& q = secondary.amplitude;
    s.pp = p.conjugate() * p.transpose();
    s.ps = p.conjugate() * q.transpose();
    s.sp = q.conjugate() * p.transpose();
    s.total = (p + q).conjugate() * (p + q).transpose();
    return ModalCorrelation(primary.omega, {std::move(s)});
}

CorrelationMatrices correlation_components(const ModalField& primary, const ModalField& secondary,
                                           const ArrayGeometry& geometry, const ModeBasis& basis,
                                           double tau) {
    const ModalCorrelation corr = make_modal_correlation(primary, secondary);
    const auto n_r = geometry.positions.size();
    Eigen::MatrixXcd phi(static_cast<Eigen::Index>(n_r), basis.count());
    for (std::size_t i = 0; i < n_r; ++i)
        phi.row(static_cast<Eigen::Index>(i)) =
            mode_values(basis, geometry.positions[i]).cast<cplx>();

    const cplx rot = std::polar(1.0, -primary.omega * tau);
    CorrelationMatrices out;
    out.pp = rot * (phi * corr.component(0, Component::pp) * phi.transpose());
    out.ps = rot * (phi * corr.component(0, Component::ps) * phi.transpose());
    out.sp = rot * (phi * corr.component(0, Component::sp) * phi.transpose());
    return out;
}

Eigen::MatrixXcd modal_correlation(const Eigen::MatrixXcd& receiver_correlation,
                                   const ArrayGeometry& geometry, const ModeBasis& basis) {
    if (!geometry.covers_full_section(basis.spec()))
        throw std::invalid_argument(
            "modal_correlation: limited aperture is unsupported; migrate through the "
            "limited-aperture imaging functional instead");
    const auto n_r = geometry.positions.size();
    if (receiver_correlation.rows() != static_cast<Eigen::Index>(n_r) ||
        receiver_correlation.cols() != static_cast<Eigen::Index>(n_r))
        throw std::invalid_argument("modal_correlation: receiver matrix size mismatch");

    const std::vector<double> w = geometry.quadrature_weights();
    Eigen::MatrixXcd proj(basis.count(), static_cast<Eigen::Index>(n_r));
    for (std::size_t i = 0; i < n_r; ++i)
        proj.col(static_cast<Eigen::Index>(i)) =
            (w[i] * mode_values(basis, geometry.positions[i])).cast<cplx>();
    return proj * receiver_correlation * proj.transpose();
}

double BroadbandSpec::frequency(double omega0, std::size_t i) const {
    return omega0 + std::pow(epsilon, alpha) * h_nodes.at(i);
}

BroadbandSpec BroadbandSpec::gaussian(const SourceSpec& source, double epsilon,
                                      std::size_t nodes, double span_sigmas) {
    if (source.kind != SourceSpec::Kind::broadband)
        throw std::invalid_argument("BroadbandSpec: source is not broadband");
    if (nodes < 64) throw std::invalid_argument("BroadbandSpec: need at least 64 nodes");
    const double s = source.bandwidth;
    const QuadratureRule rule = gauss_legendre(nodes, -span_sigmas * s, span_sigmas * s);
    BroadbandSpec spec;
    spec.alpha = source.alpha;
    spec.epsilon = epsilon;
    spec.h_nodes = rule.nodes;
    spec.weights.resize(nodes);
    const double norm = 1.0 / (s * std::sqrt(2.0 * kPi));
    for (std::size_t i = 0; i < nodes; ++i) {
        const double h = rule.nodes[i];
        spec.weights[i] = rule.weights[i] * norm * std::exp(-0.5 * h * h / (s * s));
    }
    spec.validate();
    return spec;
}

void BroadbandSpec::validate() const {
    if (h_nodes.empty() || h_nodes.size() != weights.size())
        throw std::invalid_argument("BroadbandSpec: node/weight size mismatch");
    if (epsilon <= 0.0) throw std::invalid_argument("BroadbandSpec: epsilon must be > 0");
    for (double w : weights)
        if (w < 0.0) throw std::invalid_argument("BroadbandSpec: negative weight");
    // symmetric grid about zero
    const std::size_t n = h_nodes.size();
    for (std::size_t i = 0; i < n / 2; ++i)
        if (std::abs(h_nodes[i] + h_nodes[n - 1 - i]) > 1e-9 * (std::abs(h_nodes[i]) + 1.0))
            throw std::invalid_argument("BroadbandSpec: h grid must be symmetric about 0");
}

ModalCorrelation broadband_modal_correlation(const BroadbandSpec& spec, double omega0,
                                             const ModalDataFactory& factory) {
    spec.validate();
    std::vector<ModalCorrelation::Sample> samples;
    samples.reserve(spec.h_nodes.size());
    int n_modes = -1;
    for (std::size_t i = 0; i < spec.h_nodes.size(); ++i) {
        const double omega = spec.frequency(omega0, i);
        auto [primary, secondary] = factory(omega);
        if (n_modes < 0) n_modes = primary.mode_count();
        if (primary.mode_count() != n_modes)
            throw RegimeViolationError(
                "broadband_modal_correlation: mode count changes across the band");
        ModalCorrelation one = make_modal_correlation(primary, secondary);
        ModalCorrelation::Sample s = std::move(one.samples().front());
        s.h = spec.h_nodes[i];
        s.weight = spec.weights[i];
        samples.push_back(std::move(s));
    }
    return ModalCorrelation(omega0, std::move(samples));
}

std::complex<double> broadband_correlation(const BroadbandSpec& spec, double omega0,
                                           const ModalDataFactory& factory,
                                           const ModeBasis& basis, double tau, double x1,
                                           double x2, Component which) {
    const ModalCorrelation corr = broadband_modal_correlation(spec, omega0, factory);
    return corr.receiver_value(basis, tau, x1, x2, which);
}

ModalCorrelation expected_modal_correlation(const ModeBasis& basis, double source_position,
                                            const Reflector& reflector) {
    const int n = basis.count();
    const double phi_m1 = intensity_moment(basis, -1, source_position);
    const double omega = basis.omega();
    const cplx ps_scale =
        cplx(0.0, 1.0) * omega * omega * reflector.strength * phi_m1 / 8.0;

    ModalCorrelation::Sample s;
    s.h = 0.0;
    s.weight = 1.0;
    s.omega = omega;
    s.pp = Eigen::MatrixXcd::Zero(n, n);
    s.ps = Eigen::MatrixXcd::Zero(n, n);
    s.sp = Eigen::MatrixXcd::Zero(n, n);
    for (int j = 1; j <= n; ++j) {
        const double bj = basis.wavenumber(j);
        s.pp(j - 1, j - 1) = phi_m1 / (4.0 * bj);
        for (int l = 1; l <= n; ++l) {
            const double bl = basis.wavenumber(l);
            const double shape = basis.mode(j, reflector.position) *
                                 basis.mode(l, reflector.position) / (bj * bl);
            const cplx phase = std::polar(1.0, (bj + bl) * reflector.range);
            s.ps(j - 1, l - 1) = ps_scale * shape * phase;
            s.sp(j - 1, l - 1) = -ps_scale * shape * std::conj(phase);
        }
    }
    s.total = s.pp + s.ps + s.sp;
    return ModalCorrelation(omega, {std::move(s)});
}

std::complex<double> expected_correlation_value(const ModeBasis& basis, double source_position,
                                                const Reflector& reflector, double tau, double x1,
                                                double x2, Component which) {
    const ModalCorrelation corr = expected_modal_correlation(basis, source_position, reflector);
    return corr.receiver_value(basis, tau, x1, x2, which);
}

} // namespace wgmig
