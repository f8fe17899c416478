#include "wgmig/medium.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>

#include <fftw3.h>

#include "wgmig/quadrature.hpp"
#include "wgmig/rng.hpp"

namespace wgmig {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Cached FFTW plans keyed by (rows, cols). Plan creation is not thread-safe;
// execution through fftw_execute_dft on distinct arrays is.
class PlanCache {
public:
    fftw_plan backward_2d(std::size_t rows, std::size_t cols) {
        std::scoped_lock lock(mutex_);
        auto key = std::make_pair(rows, cols);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<std::complex<double>> tmp(rows * cols);
        fftw_plan p = fftw_plan_dft_2d(
            static_cast<int>(rows), static_cast<int>(cols),
            reinterpret_cast<fftw_complex*>(tmp.data()),
            reinterpret_cast<fftw_complex*>(tmp.data()),
            FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, p);
        return p;
    }

    fftw_plan forward_1d(std::size_t n) {
        std::scoped_lock lock(mutex_);
        auto it = plans1d_.find(n);
        if (it != plans1d_.end()) return it->second;
        std::vector<std::complex<double>> tmp(n);
        fftw_plan p = fftw_plan_dft_1d(
            static_cast<int>(n),
            reinterpret_cast<fftw_complex*>(tmp.data()),
            reinterpret_cast<fftw_complex*>(tmp.data()),
            FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans1d_.emplace(n, p);
        return p;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, std::size_t>, fftw_plan> plans_;
    std::map<std::size_t, fftw_plan> plans1d_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

double kernel_value_axial(const MediumSpec& spec, double u) {
    const double t = u / spec.ell_z;
    if (spec.kernel == CorrelationKernel::exponential_axial) return std::exp(-std::abs(t));
    return std::exp(-0.5 * t * t);
}

double kernel_value_transverse(const MediumSpec& spec, double u) {
    const double t = u / spec.ell_x;
    return std::exp(-0.5 * t * t);
}

// Circular spectrum of a sampled unit-variance kernel: FFT of the
// periodized covariance sequence, clamped to be nonnegative.
std::vector<double> circular_spectrum(const MediumSpec& spec, bool axial, std::size_t n,
                                      double step) {
    std::vector<std::complex<double>> buf(n);
    for (std::size_t d = 0; d < n; ++d) {
        const std::size_t dist = std::min(d, n - d);
        const double u = step * static_cast<double>(dist);
        buf[d] = axial ? kernel_value_axial(spec, u) : kernel_value_transverse(spec, u);
    }
    fftw_plan plan = plan_cache().forward_1d(n);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(buf.data()),
                     reinterpret_cast<fftw_complex*>(buf.data()));
    std::vector<double> s(n);
    for (std::size_t m = 0; m < n; ++m) s[m] = std::max(buf[m].real(), 0.0);
    return s;
}

// int_0^a exp(i theta x) dx, stable near theta = 0.
std::complex<double> segment_transform(double theta, double a) {
    const double half = 0.5 * theta * a;
    const double sinc = (std::abs(half) < 1e-8) ? 1.0 - half * half / 6.0 : std::sin(half) / half;
    return a * sinc * std::exp(std::complex<double>(0.0, half));
}

// int_0^a cos(pi m x / a) exp(i xi x) dx.
std::complex<double> cosine_transform(int m, double xi, double a) {
    const double mu = kPi * static_cast<double>(m) / a;
    return 0.5 * (segment_transform(xi + mu, a) + segment_transform(xi - mu, a));
}

} // namespace

std::string to_string(CorrelationKernel k) {
    switch (k) {
        case CorrelationKernel::gaussian: return "gaussian";
        case CorrelationKernel::exponential_axial: return "exponential-z-gaussian-x";
    }
    return "unknown";
}

void MediumSpec::validate() const {
    if (epsilon <= 0.0 || epsilon > 0.5)
        throw std::invalid_argument("MediumSpec: epsilon must lie in (0, 0.5]");
    if (ell_z <= 0.0 || ell_x <= 0.0)
        throw std::invalid_argument("MediumSpec: correlation lengths must be > 0");
    if (sigma_nu < 0.0) throw std::invalid_argument("MediumSpec: sigma_nu must be >= 0");
}

std::vector<std::string> MediumSpec::warnings(const WaveguideSpec& wg) const {
    std::vector<std::string> out;
    if (epsilon > 0.2) out.push_back("epsilon > 0.2: fluctuations are not weak");
    const double lambda = wg.wavelength();
    for (auto [len, name] : {std::pair{ell_z, "ell_z"}, std::pair{ell_x, "ell_x"}}) {
        const double ratio = len / lambda;
        if (ratio < 0.1 || ratio > 10.0)
            out.push_back(std::string(name) + "/lambda = " + std::to_string(ratio) +
                          " outside [0.1, 10]");
    }
    return out;
}

CouplingProcess::CouplingProcess(WaveguideSpec wg, int n_modes, double z_step, double ell_z,
                                 Eigen::MatrixXd cosine_moments)
    : wg_(wg), n_modes_(n_modes), z_step_(z_step), ell_z_(ell_z),
      moments_(std::move(cosine_moments)) {
    if (moments_.rows() != 2 * n_modes_ + 1)
        throw std::invalid_argument("CouplingProcess: moment table must have 2N+1 rows");
}

std::vector<double> CouplingProcess::grid_z() const {
    std::vector<double> z(samples());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = z_at(i);
    return z;
}

double CouplingProcess::value(std::size_t iz, int j, int l) const {
    if (j < 1 || l < 1 || j > n_modes_ || l > n_modes_)
        throw std::out_of_range("CouplingProcess::value: mode index outside table");
    const auto col = static_cast<Eigen::Index>(iz);
    return (moments_(std::abs(j - l), col) - moments_(j + l, col)) / wg_.width;
}

Eigen::MatrixXd CouplingProcess::matrix_at(std::size_t iz) const {
    Eigen::MatrixXd m(n_modes_, n_modes_);
    for (int j = 1; j <= n_modes_; ++j)
        for (int l = j; l <= n_modes_; ++l) {
            const double v = value(iz, j, l);
            m(j - 1, l - 1) = v;
            m(l - 1, j - 1) = v;
        }
    return m;
}

void CouplingProcess::moments_at(double z, double* out) const {
    const double pos = z / z_step_;
    const auto last = static_cast<double>(samples() - 1);
    const double clamped = std::clamp(pos, 0.0, last);
    const auto i0 = static_cast<Eigen::Index>(std::min(clamped, last - 1.0));
    const double w = clamped - static_cast<double>(i0);
    const int rows = 2 * n_modes_ + 1;
    for (int m = 0; m < rows; ++m)
        out[m] = (1.0 - w) * moments_(m, i0) + w * moments_(m, i0 + 1);
}

MediumSampler::MediumSampler(const MediumSpec& spec, const ModeBasis& basis, double z_extent,
                             std::optional<double> dx, std::optional<double> dz)
    : spec_(spec), wg_(basis.spec()), n_modes_(basis.count()), z_extent_(z_extent) {
    spec_.validate();
    if (z_extent <= 0.0) throw std::invalid_argument("MediumSampler: z_extent must be > 0");

    const double lambda = basis.wavelength();
    const double dx_limit = std::min(spec_.ell_x, lambda) / 8.0;
    const double dz_limit = spec_.ell_z / 4.0;
    dx_ = dx.value_or(dx_limit);
    dz_ = dz.value_or(dz_limit);
    if (dx_ > dx_limit * (1.0 + 1e-12))
        throw ResolutionError("MediumSampler: transverse step exceeds min(ell_x, lambda)/8");
    if (dz_ > dz_limit * (1.0 + 1e-12))
        throw ResolutionError("MediumSampler: axial step exceeds ell_z/4");

    const std::size_t n_points = simpson_points_for_step(wg_.width, dx_);
    nx_ = n_points;
    dx_ = wg_.width / static_cast<double>(nx_ - 1);
    nz_ = static_cast<std::size_t>(std::ceil(z_extent / dz_)) + 1;

    const auto pad_x = static_cast<std::size_t>(std::ceil(8.0 * spec_.ell_x / dx_));
    const auto pad_z = static_cast<std::size_t>(std::ceil(8.0 * spec_.ell_z / dz_));
    px_ = next_pow2(nx_ + pad_x);
    pz_ = next_pow2(nz_ + pad_z);

    const std::vector<double> sx = circular_spectrum(spec_, false, px_, dx_);
    const std::vector<double> sz = circular_spectrum(spec_, true, pz_, dz_);
    spectrum_.resize(px_ * pz_);
    const double var = spec_.sigma_nu * spec_.sigma_nu;
    for (std::size_t p = 0; p < px_; ++p)
        for (std::size_t q = 0; q < pz_; ++q)
            spectrum_[p * pz_ + q] = std::sqrt(var * sx[p] * sz[q]);

    // Simpson quadrature rows: cos_table_(m, i) = w_i cos(pi m x_i / a).
    const std::vector<double> w = simpson_weights(nx_, dx_);
    cos_table_.resize(2 * n_modes_ + 1, static_cast<Eigen::Index>(nx_));
    for (int m = 0; m <= 2 * n_modes_; ++m)
        for (std::size_t i = 0; i < nx_; ++i) {
            const double x = dx_ * static_cast<double>(i);
            cos_table_(m, static_cast<Eigen::Index>(i)) =
                w[i] * std::cos(kPi * static_cast<double>(m) * x / wg_.width);
        }

    plan_cache().backward_2d(px_, pz_);  // build the plan up front
}

CouplingProcess MediumSampler::sample(std::uint64_t realization) const {
    std::vector<std::complex<double>> field(px_ * pz_);

    if (spec_.sigma_nu > 0.0) {
        auto engine = make_engine(spec_.seed, realization);
        // standard complex Gaussian: E|W|^2 = 1
        std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
        for (std::size_t i = 0; i < field.size(); ++i) {
            const double re = gauss(engine);
            const double im = gauss(engine);
            field[i] = spectrum_[i] * std::complex<double>(re, im);
        }
        fftw_plan plan = plan_cache().backward_2d(px_, pz_);
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(field.data()),
                         reinterpret_cast<fftw_complex*>(field.data()));
    }

    // nu on the physical grid; Re of the synthesized complex field carries
    // half the energy, hence the sqrt(2).
    const double scale = std::sqrt(2.0 / (static_cast<double>(px_) * static_cast<double>(pz_)));
    Eigen::MatrixXd nu(static_cast<Eigen::Index>(nx_), static_cast<Eigen::Index>(nz_));
    for (std::size_t i = 0; i < nx_; ++i)
        for (std::size_t q = 0; q < nz_; ++q)
            nu(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(q)) =
                scale * field[i * pz_ + q].real();

    Eigen::MatrixXd moments = cos_table_ * nu;
    return CouplingProcess(wg_, n_modes_, dz_, spec_.ell_z, std::move(moments));
}

CouplingProcess sample_medium(const MediumSpec& spec, const ModeBasis& basis, double z_extent,
                              std::uint64_t realization) {
    return MediumSampler(spec, basis, z_extent).sample(realization);
}

double axial_spectrum(const MediumSpec& spec, double kappa) {
    const double l = spec.ell_z;
    if (spec.kernel == CorrelationKernel::exponential_axial)
        return 2.0 * l / (1.0 + kappa * kappa * l * l);
    return l * std::sqrt(2.0 * kPi) * std::exp(-0.5 * kappa * kappa * l * l);
}

double coupling_transverse_factor(const MediumSpec& spec, const ModeBasis& basis, int j, int l) {
    if (j < 1 || l < 1 || j > basis.count() || l > basis.count())
        throw std::out_of_range("coupling_transverse_factor: mode index outside basis");
    const double a = basis.spec().width;
    const double lx = spec.ell_x;

    // S_jl = sigma^2/(2pi) * int Rx_hat(xi) |G_jl(xi)|^2 dxi with
    // G_jl(xi) = (I_|j-l|(xi) - I_{j+l}(xi)) / a. The integrand decays like
    // the Gaussian Rx_hat and oscillates on the scale pi/a.
    const double xi_max = 8.0 / lx;
    const auto oscillations = static_cast<std::size_t>(std::ceil(xi_max * a / kPi));
    const std::size_t n = std::max<std::size_t>(96, 8 * oscillations);
    const QuadratureRule rule = gauss_legendre(n, -xi_max, xi_max);

    double integral = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double xi = rule.nodes[i];
        const double rx_hat = lx * std::sqrt(2.0 * kPi) * std::exp(-0.5 * xi * xi * lx * lx);
        const std::complex<double> g =
            (cosine_transform(std::abs(j - l), xi, a) - cosine_transform(j + l, xi, a)) / a;
        integral += rule.weights[i] * rx_hat * std::norm(g);
    }
    return spec.sigma_nu * spec.sigma_nu * integral / (2.0 * kPi);
}

double coupling_psd(const MediumSpec& spec, const ModeBasis& basis, int j, int l, double kappa) {
    return coupling_transverse_factor(spec, basis, j, l) * axial_spectrum(spec, kappa);
}

} // namespace wgmig
