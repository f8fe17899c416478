#include "wgmig/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wgmig {

namespace {

constexpr double kUnitarityTol = 1e-8;
constexpr double kPiValue = 3.14159265358979323846;

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using cplx = std::complex<double>;

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

// Diagonal Pade approximant of exp(A). For skew-Hermitian A the rational
// map q(A)^{-1} p(A) with p(x) = q(-x) is exactly unitary, and squaring
// preserves unitarity, so the result is unitary to roundoff regardless of
// the approximation order.
struct ExpmWorkspace {
    MatrixXcd a2, a4, u, v, num, den;

    void resize(Eigen::Index n) {
        a2.resize(n, n);
        a4.resize(n, n);
        u.resize(n, n);
        v.resize(n, n);
        num.resize(n, n);
        den.resize(n, n);
    }

    MatrixXcd run(MatrixXcd a) {
        const Eigen::Index n = a.rows();
        resize(n);
        const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();  // 1-norm of A^T = inf-norm
        int squarings = 0;
        if (norm > 0.25) {
            squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / 0.25))));
            a *= std::ldexp(1.0, -squarings);
        }

        a2.noalias() = a * a;
        if (norm <= 0.015 && squarings == 0) {
            // Pade(3,3): p(x) = 120 + 60 x + 12 x^2 + x^3
            u.noalias() = a * (a2 + 60.0 * MatrixXcd::Identity(n, n));
            v = 12.0 * a2 + 120.0 * MatrixXcd::Identity(n, n);
        } else {
            // Pade(5,5): p(x) = 30240 + 15120 x + 3360 x^2 + 420 x^3 + 30 x^4 + x^5
            a4.noalias() = a2 * a2;
            u.noalias() = a * (a4 + 420.0 * a2 + 15120.0 * MatrixXcd::Identity(n, n));
            v = 30.0 * a4 + 3360.0 * a2 + 30240.0 * MatrixXcd::Identity(n, n);
        }
        num = v + u;
        den = v - u;
        MatrixXcd result = den.partialPivLu().solve(num);
        for (int s = 0; s < squarings; ++s) result = result * result;
        return result;
    }
};

struct StepContext {
    int n = 0;
    double a = 0.0;            // waveguide width
    Eigen::MatrixXd prefactor; // eps k^2 h / (2 sqrt(bj bl)) * sinc((bl-bj)h/2)
    std::vector<double> beta;
    std::vector<cplx> phase;       // exp(i beta_j zeta_mid)
    std::vector<cplx> phase_step;  // exp(i beta_j h)
    std::vector<double> moments;   // interpolated cosine moments, 2N+1
    MatrixXcd omega_step;
    ExpmWorkspace expm;

    StepContext(const ModeBasis& basis, double epsilon, double h, double a_width)
        : n(basis.count()), a(a_width), beta(basis.wavenumbers()) {
        const double k = basis.wavenumber_total();
        prefactor.resize(n, n);
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                const double beat = beta[static_cast<std::size_t>(l)] -
                                    beta[static_cast<std::size_t>(j)];
                prefactor(j, l) = epsilon * k * k * h * sinc(0.5 * beat * h) /
                                  (2.0 * std::sqrt(beta[static_cast<std::size_t>(j)] *
                                                   beta[static_cast<std::size_t>(l)]));
            }
        phase.resize(static_cast<std::size_t>(n));
        phase_step.resize(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j)
            phase_step[static_cast<std::size_t>(j)] =
                std::polar(1.0, beta[static_cast<std::size_t>(j)] * h);
        moments.resize(static_cast<std::size_t>(2 * n + 1));
        omega_step.resize(n, n);
    }

    void reset_phases(double zeta_mid) {
        for (int j = 0; j < n; ++j)
            phase[static_cast<std::size_t>(j)] =
                std::polar(1.0, beta[static_cast<std::size_t>(j)] * zeta_mid);
    }

    void advance_phases() {
        for (int j = 0; j < n; ++j)
            phase[static_cast<std::size_t>(j)] *= phase_step[static_cast<std::size_t>(j)];
    }

    // Skew-Hermitian increment for the step with midpoint coupling moments.
    void build_increment(const CouplingProcess& coupling, double zeta_mid) {
        coupling.moments_at(zeta_mid, moments.data());
        for (int j = 0; j < n; ++j) {
            const double cjj = (moments[0] - moments[static_cast<std::size_t>(2 * (j + 1))]) / a;
            omega_step(j, j) = cplx(0.0, prefactor(j, j) * cjj);
            for (int l = j + 1; l < n; ++l) {
                const double c =
                    (moments[static_cast<std::size_t>(l - j)] -
                     moments[static_cast<std::size_t>(j + l + 2)]) / a;
                const cplx beat = phase[static_cast<std::size_t>(l)] *
                                  std::conj(phase[static_cast<std::size_t>(j)]);
                const cplx value = cplx(0.0, prefactor(j, l) * c) * beat;
                omega_step(j, l) = value;
                omega_step(l, j) = -std::conj(value);
            }
        }
    }
};

}  // namespace

void SourceSpec::validate(const WaveguideSpec& wg) const {
    if (position <= 0.0 || position >= wg.width)
        throw std::invalid_argument("SourceSpec: position must lie strictly inside (0, a)");
    if (kind == Kind::broadband) {
        if (alpha <= 1.0 || alpha >= 2.0)
            throw std::invalid_argument("SourceSpec: broadband alpha must lie in (1, 2)");
        if (bandwidth <= 0.0)
            throw std::invalid_argument("SourceSpec: broadband bandwidth must be > 0");
    }
}

double unitarity_defect(const Eigen::MatrixXcd& t) {
    const Eigen::Index n = t.rows();
    return (t.adjoint() * t - MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

std::vector<PropagatorMatrix> propagate_checkpoints(double omega,
                                                    const CouplingProcess& coupling,
                                                    std::span<const double> distances,
                                                    double epsilon, double step) {
    if (epsilon <= 0.0) throw std::invalid_argument("propagate: epsilon must be > 0");
    if (step <= 0.0) throw std::invalid_argument("propagate: step must be > 0");
    if (distances.empty()) throw std::invalid_argument("propagate: no distances requested");
    if (!std::is_sorted(distances.begin(), distances.end()))
        throw std::invalid_argument("propagate: distances must be ascending");
    if (distances.front() < 0.0)
        throw std::invalid_argument("propagate: distances must be nonnegative");

    const ModeBasis basis(coupling.waveguide(), omega);
    if (basis.count() != coupling.mode_count())
        throw std::invalid_argument("propagate: coupling was sampled for a different mode count");

    const double extent = distances.back() / (epsilon * epsilon);
    if (coupling.z_extent() < extent * (1.0 - 1e-12))
        throw std::invalid_argument("propagate: coupling does not cover the physical extent");

    double min_beat = std::numeric_limits<double>::infinity();
    const auto& beta = basis.wavenumbers();
    for (std::size_t j = 0; j < beta.size(); ++j)
        for (std::size_t l = j + 1; l < beta.size(); ++l)
            min_beat = std::min(min_beat, 2.0 * kPiValue / std::abs(beta[j] - beta[l]));
    const double limit = std::min(coupling.axial_correlation_length(),
                                  std::isfinite(min_beat) ? min_beat : step * 8.0) / 8.0;
    if (step > limit * (1.0 + 1e-12))
        throw StabilityError("propagate: step exceeds min(ell_z, beat length)/8");

    const int n = basis.count();
    MatrixXcd t = MatrixXcd::Identity(n, n);
    std::vector<PropagatorMatrix> out;
    out.reserve(distances.size());

    double zeta = 0.0;
    for (double target_l : distances) {
        const double target = target_l / (epsilon * epsilon);
        const double seg = target - zeta;
        if (seg > 0.0) {
            const auto steps = static_cast<std::size_t>(std::ceil(seg / step - 1e-9));
            const double h = seg / static_cast<double>(steps);
            // h <= step by construction; rebuild step-size dependent tables
            // only when h differs from the previous segment.
            StepContext seg_ctx(basis, epsilon, h, coupling.waveguide().width);
            seg_ctx.reset_phases(zeta + 0.5 * h);
            for (std::size_t i = 0; i < steps; ++i) {
                if (i > 0 && i % 256 == 0)
                    seg_ctx.reset_phases(zeta + (static_cast<double>(i) + 0.5) * h);
                seg_ctx.build_increment(coupling, zeta + (static_cast<double>(i) + 0.5) * h);
                t = seg_ctx.expm.run(seg_ctx.omega_step) * t;
                seg_ctx.advance_phases();
            }
            zeta = target;
        }
        const double defect = unitarity_defect(t);
        if (defect > kUnitarityTol)
            throw IntegrationFailure("propagate: unitarity defect " + std::to_string(defect) +
                                     " exceeds tolerance");
        out.push_back(PropagatorMatrix{omega, t, target_l, epsilon});
    }
    return out;
}

PropagatorMatrix propagate(double omega, const CouplingProcess& coupling, double distance,
                           double epsilon, double step) {
    const double distances[1] = {distance};
    return std::move(propagate_checkpoints(omega, coupling, distances, epsilon, step).front());
}

Eigen::VectorXcd initial_amplitudes(const SourceSpec& source, double omega,
                                    const ModeBasis& basis) {
    source.validate(basis.spec());
    if (std::abs(omega - basis.omega()) > 1e-12 * basis.omega())
        throw std::invalid_argument("initial_amplitudes: basis built for a different frequency");
    const int n = basis.count();
    VectorXcd a0(n);
    for (int l = 1; l <= n; ++l)
        a0(l - 1) = basis.mode(l, source.position) /
                    (cplx(0.0, 2.0) * std::sqrt(basis.wavenumber(l)));
    return a0;
}

Eigen::VectorXcd transmitted_amplitudes(const PropagatorMatrix& t, const Eigen::VectorXcd& a0) {
    if (t.matrix.cols() != a0.size())
        throw std::invalid_argument("transmitted_amplitudes: dimension mismatch");
    return t.matrix * a0;
}

namespace detail {

Eigen::MatrixXcd mode_coupling_generator(const CouplingProcess& coupling, double omega,
                                         double zeta) {
    const ModeBasis basis(coupling.waveguide(), omega);
    const int n = basis.count();
    if (n != coupling.mode_count())
        throw std::invalid_argument("mode_coupling_generator: mode count mismatch");
    const double k = basis.wavenumber_total();

    std::vector<double> moments(static_cast<std::size_t>(2 * n + 1));
    coupling.moments_at(zeta, moments.data());
    const double a = coupling.waveguide().width;

    MatrixXcd h(n, n);
    for (int j = 1; j <= n; ++j)
        for (int l = 1; l <= n; ++l) {
            const double c = (moments[static_cast<std::size_t>(std::abs(j - l))] -
                              moments[static_cast<std::size_t>(j + l)]) / a;
            const double beat = (basis.wavenumber(l) - basis.wavenumber(j)) * zeta;
            h(j - 1, l - 1) = cplx(0.0, 0.5 * k * k) * c *
                              std::polar(1.0, beat) /
                              std::sqrt(basis.wavenumber(j) * basis.wavenumber(l));
        }
    return h;
}

Eigen::MatrixXcd expm_skew_hermitian(const Eigen::MatrixXcd& a) {
    ExpmWorkspace ws;
    return ws.run(a);
}

} // namespace detail

} // namespace wgmig
