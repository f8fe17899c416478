#include "wgmig/imaging.hpp"

#include <cmath>
#include <stdexcept>

#include "wgmig/errors.hpp"
#include "wgmig/quadrature.hpp"

namespace wgmig {

using cplx = std::complex<double>;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = 0.5 * (lo + hi);
        return v;
    }
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + h * static_cast<double>(i);
    v.back() = hi;
    return v;
}

// Oscillatory angle integrals with a node count that follows the phase.
std::complex<double> angle_integral(double xi, double eta, int cos_power) {
    const double scale = std::max(std::abs(xi), std::abs(eta));
    const std::size_t n = std::max<std::size_t>(96, 12 * static_cast<std::size_t>(scale + 1.0));
    const QuadratureRule rule = gauss_legendre(n, -0.5 * kPi, 0.5 * kPi);
    cplx sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = rule.nodes[i];
        const double c = std::cos(t);
        const double w = cos_power == 1 ? c : c * c;
        sum += rule.weights[i] * w * std::polar(1.0, eta * c + xi * std::sin(t));
    }
    return sum;
}

double bessel_j1_over_x(double x) {
    if (std::abs(x) < 1e-6) return 0.5 - x * x / 16.0;
    return std::cyl_bessel_j(1, std::abs(x)) / std::abs(x);
}

double bessel_j1_prime(double x) {
    const double ax = std::abs(x);
    if (ax < 1e-6) return 0.5 - 3.0 * x * x / 16.0;
    return std::cyl_bessel_j(0, ax) - std::cyl_bessel_j(1, ax) / ax;
}

} // namespace

ImageGridSpec ImageGridSpec::centered(double x0, double z0, double half_span_x,
                                      double half_span_z, double step) {
    if (step <= 0.0) throw std::invalid_argument("ImageGridSpec: step must be > 0");
    const auto count = [step](double half) {
        return 2 * static_cast<std::size_t>(std::ceil(half / step)) + 1;
    };
    ImageGridSpec g;
    g.x = linspace(x0 - half_span_x, x0 + half_span_x, count(half_span_x));
    g.z = linspace(z0 - half_span_z, z0 + half_span_z, count(half_span_z));
    return g;
}

namespace {
ImagePeak peak_of(const ImageGrid& img, bool absolute) {
    ImagePeak best;
    double best_score = -1.0;
    for (Eigen::Index ix = 0; ix < img.values.rows(); ++ix)
        for (Eigen::Index iz = 0; iz < img.values.cols(); ++iz) {
            const double v = img.values(ix, iz);
            const double score = absolute ? std::abs(v) : v;
            if (score > best_score) {
                best_score = score;
                best = ImagePeak{img.grid.x[static_cast<std::size_t>(ix)],
                                 img.grid.z[static_cast<std::size_t>(iz)], v,
                                 static_cast<std::size_t>(ix), static_cast<std::size_t>(iz)};
            }
        }
    return best;
}
} // namespace

ImagePeak ImageGrid::argmax_abs() const { return peak_of(*this, true); }
ImagePeak ImageGrid::argmax() const { return peak_of(*this, false); }

std::complex<double> kirchhoff_value(const Eigen::VectorXcd& modal_data, const ModeBasis& basis,
                                     double x, double z) {
    const int n = basis.count();
    if (modal_data.size() != n)
        throw std::invalid_argument("kirchhoff_value: modal data size mismatch");
    cplx sum = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double beta = basis.wavenumber(j);
        sum += beta * basis.mode(j, x) * std::polar(1.0, -beta * z) * modal_data(j - 1);
    }
    return sum / static_cast<double>(n);
}

ImageGrid kirchhoff_image(const Eigen::VectorXcd& modal_data, const ModeBasis& basis,
                          const ImageGridSpec& grid) {
    ImageGrid img;
    img.grid = grid;
    img.tag = "KM";
    img.values.resize(static_cast<Eigen::Index>(grid.x.size()),
                      static_cast<Eigen::Index>(grid.z.size()));
    img.magnitude.resizeLike(img.values);
    for (std::size_t ix = 0; ix < grid.x.size(); ++ix)
        for (std::size_t iz = 0; iz < grid.z.size(); ++iz) {
            const cplx v = kirchhoff_value(modal_data, basis, grid.x[ix], grid.z[iz]);
            img.values(static_cast<Eigen::Index>(ix), static_cast<Eigen::Index>(iz)) = v.real();
            img.magnitude(static_cast<Eigen::Index>(ix), static_cast<Eigen::Index>(iz)) =
                std::abs(v);
        }
    return img;
}

Eigen::MatrixXd aperture_gram(const ArrayGeometry& geometry, const ModeBasis& basis) {
    const int n = basis.count();
    const std::vector<double> w = geometry.quadrature_weights();
    Eigen::MatrixXd phi(static_cast<Eigen::Index>(geometry.positions.size()), n);
    for (std::size_t i = 0; i < geometry.positions.size(); ++i)
        for (int j = 1; j <= n; ++j)
            phi(static_cast<Eigen::Index>(i), j - 1) = basis.mode(j, geometry.positions[i]);
    Eigen::MatrixXd gram(n, n);
    for (int q = 0; q < n; ++q)
        for (int j = q; j < n; ++j) {
            double sum = 0.0;
            for (std::size_t i = 0; i < geometry.positions.size(); ++i)
                sum += w[i] * phi(static_cast<Eigen::Index>(i), q) *
                       phi(static_cast<Eigen::Index>(i), j);
            gram(q, j) = sum;
            gram(j, q) = sum;
        }
    return gram;
}

Eigen::MatrixXd aperture_gram_exact(double a1, double a2, const ModeBasis& basis) {
    const double a = basis.spec().width;
    const auto cosine_integral = [&](int m) {
        if (m == 0) return a2 - a1;
        const double mu = kPi * static_cast<double>(m) / a;
        return (std::sin(mu * a2) - std::sin(mu * a1)) / mu;
    };
    const int n = basis.count();
    Eigen::MatrixXd gram(n, n);
    for (int q = 1; q <= n; ++q)
        for (int j = 1; j <= n; ++j)
            gram(q - 1, j - 1) =
                (cosine_integral(std::abs(q - j)) - cosine_integral(q + j)) / a;
    return gram;
}

CorrelationImager CorrelationImager::full_aperture(const ModalCorrelation& corr,
                                                   const ModeBasis& basis, Component which) {
    if (corr.mode_count() != basis.count())
        throw std::invalid_argument("CorrelationImager: correlation/basis mode mismatch");
    CorrelationImager imager(basis);
    imager.tag_ = "FA";
    imager.beta_weight_ = true;
    imager.omega0_ = corr.omega0();
    for (std::size_t s = 0; s < corr.samples().size(); ++s) {
        imager.omega_.push_back(corr.samples()[s].omega);
        imager.weight_.push_back(corr.samples()[s].weight);
        imager.effective_.push_back(corr.component(s, which));
    }
    return imager;
}

CorrelationImager CorrelationImager::limited_aperture(const ModalCorrelation& corr,
                                                      const ArrayGeometry& geometry,
                                                      const ModeBasis& basis, Component which) {
    if (corr.mode_count() != basis.count())
        throw std::invalid_argument("CorrelationImager: correlation/basis mode mismatch");
    geometry.validate(basis.spec());

    Eigen::VectorXd beta_sq(basis.count());
    for (int j = 1; j <= basis.count(); ++j)
        beta_sq(j - 1) = basis.wavenumber(j) * basis.wavenumber(j);
    const Eigen::MatrixXd gram = aperture_gram(geometry, basis);
    const Eigen::MatrixXd weighting = gram * beta_sq.asDiagonal();

    CorrelationImager imager(basis);
    imager.tag_ = "LA";
    imager.beta_weight_ = false;
    imager.omega0_ = corr.omega0();
    const Eigen::MatrixXcd left = weighting.cast<cplx>();
    for (std::size_t s = 0; s < corr.samples().size(); ++s) {
        imager.omega_.push_back(corr.samples()[s].omega);
        imager.weight_.push_back(corr.samples()[s].weight);
        imager.effective_.push_back(left * corr.component(s, which) * left.adjoint());
    }
    return imager;
}

double CorrelationImager::value(double x, double z) const {
    const int n = basis_.count();
    Eigen::VectorXd shape(n);
    for (int j = 1; j <= n; ++j) {
        shape(j - 1) = basis_.mode(j, x);
        if (beta_weight_) shape(j - 1) *= basis_.wavenumber(j);
    }
    double total = 0.0;
    Eigen::VectorXcd v(n);
    for (std::size_t s = 0; s < effective_.size(); ++s) {
        const double lag_scale = omega_[s] / omega0_;
        for (int j = 1; j <= n; ++j)
            v(j - 1) = shape(j - 1) * std::polar(1.0, -lag_scale * basis_.wavenumber(j) * z);
        const cplx quad = (v.transpose() * effective_[s] * v).value();
        total += weight_[s] * quad.imag();
    }
    return 2.0 * total / (static_cast<double>(n) * static_cast<double>(n));
}

ImageGrid CorrelationImager::image(const ImageGridSpec& grid) const {
    ImageGrid img;
    img.grid = grid;
    img.tag = tag_;
    img.values.resize(static_cast<Eigen::Index>(grid.x.size()),
                      static_cast<Eigen::Index>(grid.z.size()));
    img.magnitude.resizeLike(img.values);
    for (std::size_t ix = 0; ix < grid.x.size(); ++ix)
        for (std::size_t iz = 0; iz < grid.z.size(); ++iz) {
            const double v = value(grid.x[ix], grid.z[iz]);
            img.values(static_cast<Eigen::Index>(ix), static_cast<Eigen::Index>(iz)) = v;
            img.magnitude(static_cast<Eigen::Index>(ix), static_cast<Eigen::Index>(iz)) =
                std::abs(v);
        }
    return img;
}

double cross_range_psf(double xi) {
    const double r = bessel_j1_over_x(xi);
    return kPi * kPi * r * r;
}

double range_psf(double eta) {
    const double re = kPi * bessel_j1_prime(eta);
    const QuadratureRule rule = gauss_legendre(
        std::max<std::size_t>(96, 12 * static_cast<std::size_t>(std::abs(eta) + 1.0)), -0.5 * kPi,
        0.5 * kPi);
    double im = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double c = std::cos(rule.nodes[i]);
        im += rule.weights[i] * c * c * std::sin(eta * c);
    }
    return re * re - im * im;
}

std::complex<double> aperture_angle_integral_cos(double xi, double eta) {
    return angle_integral(xi, eta, 1);
}

std::complex<double> aperture_angle_integral_cos2(double xi, double eta) {
    return angle_integral(xi, eta, 2);
}

double expected_full_aperture_value(const ModeBasis& basis, double source_position,
                                    const Reflector& reflector, double x, double z) {
    const int n = basis.count();
    const double phi_m1 = intensity_moment(basis, -1, source_position);
    const double omega = basis.omega();

    double background = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double phi = basis.mode(j, x);
        background += basis.wavenumber(j) * phi * phi * std::sin(2.0 * basis.wavenumber(j) * z);
    }
    background *= -phi_m1 / (2.0 * static_cast<double>(n) * static_cast<double>(n));

    const cplx psi_peak = migration_kernel(basis, x, z, reflector.position, reflector.range);
    const cplx psi_mirror = migration_kernel(basis, x, z, reflector.position, -reflector.range);
    const double peak_scale = omega * omega * reflector.strength * phi_m1 / 4.0;
    return background + peak_scale * ((psi_peak * psi_peak).real() -
                                      (psi_mirror * psi_mirror).real());
}

ImageGrid expected_full_aperture_image(const ModeBasis& basis, double source_position,
                                       const Reflector& reflector, const ImageGridSpec& grid) {
    ImageGrid img;
    img.grid = grid;
    img.tag = "FA";
    img.values.resize(static_cast<Eigen::Index>(grid.x.size()),
                      static_cast<Eigen::Index>(grid.z.size()));
    img.magnitude.resizeLike(img.values);
    for (std::size_t ix = 0; ix < grid.x.size(); ++ix)
        for (std::size_t iz = 0; iz < grid.z.size(); ++iz) {
            const double v = expected_full_aperture_value(basis, source_position, reflector,
                                                          grid.x[ix], grid.z[iz]);
            img.values(static_cast<Eigen::Index>(ix), static_cast<Eigen::Index>(iz)) = v;
            img.magnitude(static_cast<Eigen::Index>(ix), static_cast<Eigen::Index>(iz)) =
                std::abs(v);
        }
    return img;
}

double expected_full_aperture_continuum(const ModeBasis& basis, double strength, double xi,
                                        double eta) {
    const double a = basis.spec().width;
    const double k = basis.wavenumber_total();
    const double omega = basis.omega();
    const cplx integral = aperture_angle_integral_cos(xi, eta);
    return kPi * omega * omega * strength / (32.0 * a * a * a * k) *
           (integral * integral).real();
}

double peak_amplitude_continuum(const ModeBasis& basis, double strength) {
    const double a = basis.spec().width;
    const double k = basis.wavenumber_total();
    const double omega = basis.omega();
    return kPi * omega * omega * strength / (8.0 * a * a * a * k);
}

double expected_limited_aperture_continuum(const ModeBasis& basis, double strength,
                                           double aperture_width, double xi, double eta) {
    const double a = basis.spec().width;
    const double k = basis.wavenumber_total();
    const double omega = basis.omega();
    const cplx integral = aperture_angle_integral_cos2(xi, eta);
    return kPi * omega * omega * k * strength * aperture_width * aperture_width /
           (32.0 * std::pow(a, 5)) * (integral * integral).real();
}

double first_zero_half_width(const std::vector<double>& axis, const std::vector<double>& values,
                             std::size_t peak_index) {
    if (axis.size() != values.size() || axis.size() < 3)
        throw std::invalid_argument("first_zero_half_width: bad profile");
    if (peak_index >= axis.size())
        throw std::invalid_argument("first_zero_half_width: peak outside profile");
    const double peak_sign = values[peak_index] >= 0.0 ? 1.0 : -1.0;

    const auto crossing = [&](bool forward) -> double {
        std::size_t i = peak_index;
        while (true) {
            const std::size_t next = forward ? i + 1 : i - 1;
            if ((forward && next >= axis.size()) || (!forward && i == 0))
                throw Error("first_zero_half_width: no zero crossing inside the window");
            const double v0 = peak_sign * values[i];
            const double v1 = peak_sign * values[next];
            if (v0 > 0.0 && v1 <= 0.0) {
                const double t = v0 / (v0 - v1);
                return std::abs(axis[i] + t * (axis[next] - axis[i]) - axis[peak_index]);
            }
            i = next;
        }
    };
    return 0.5 * (crossing(true) + crossing(false));
}

} // namespace wgmig
