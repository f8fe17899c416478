#include "wgmig/moments.hpp"

#include <cmath>
#include <stdexcept>

#include "wgmig/errors.hpp"

namespace wgmig {

Eigen::MatrixXd gamma_matrix(const MediumSpec& medium, const ModeBasis& basis) {
    const int n = basis.count();
    const double k = basis.wavenumber_total();
    const double k4 = k * k * k * k;
    Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n, n);
    for (int j = 1; j <= n; ++j) {
        for (int l = j + 1; l <= n; ++l) {
            const double beat = basis.wavenumber(j) - basis.wavenumber(l);
            const double psd = coupling_psd(medium, basis, j, l, beat);
            const double value = k4 * psd / (4.0 * basis.wavenumber(j) * basis.wavenumber(l));
            gamma(j - 1, l - 1) = value;
            gamma(l - 1, j - 1) = value;
        }
    }
    return gamma;
}

namespace {

// Generator of the coupled-power system: G = gamma - diag(row sums).
Eigen::MatrixXd power_generator(const Eigen::MatrixXd& gamma) {
    Eigen::MatrixXd g = gamma;
    g.diagonal().setZero();
    g.diagonal() = -g.rowwise().sum();
    return g;
}

} // namespace

double equipartition_distance(const Eigen::MatrixXd& gamma) {
    if (gamma.rows() != gamma.cols() || gamma.rows() < 2)
        throw std::invalid_argument("equipartition_distance: need a square matrix, N >= 2");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(power_generator(gamma));
    const Eigen::VectorXd ev = solver.eigenvalues();  // ascending, top one ~ 0
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    const double gap = -ev(ev.size() - 2);
    if (!(gap > 1e-12 * scale))
        throw NoEquipartitionError("coupling graph is reducible; no spectral gap");
    return 1.0 / gap;
}

MomentModel make_moment_model(const MediumSpec& medium, const ModeBasis& basis) {
    MomentModel model;
    model.gamma = gamma_matrix(medium, basis);
    model.equip_distance = equipartition_distance(model.gamma);
    return model;
}

std::vector<Eigen::VectorXd> coupled_power_curve(const MomentModel& model,
                                                 std::span<const double> distances,
                                                 int launch_mode) {
    const Eigen::Index n = model.gamma.rows();
    if (launch_mode < 1 || launch_mode > n)
        throw std::out_of_range("coupled_power_solve: launch mode outside [1, N]");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(power_generator(model.gamma));
    const Eigen::MatrixXd& v = solver.eigenvectors();
    const Eigen::VectorXd coeffs = v.row(launch_mode - 1);  // V^T e_l

    std::vector<Eigen::VectorXd> out;
    out.reserve(distances.size());
    for (double z : distances) {
        if (z < 0.0) throw std::invalid_argument("coupled_power_solve: distance must be >= 0");
        Eigen::VectorXd weights(n);
        for (Eigen::Index i = 0; i < n; ++i)
            weights(i) = coeffs(i) * std::exp(solver.eigenvalues()(i) * z);
        out.emplace_back(v * weights);
    }
    return out;
}

Eigen::VectorXd coupled_power_solve(const MomentModel& model, double distance, int launch_mode) {
    const double d[1] = {distance};
    return coupled_power_curve(model, d, launch_mode).front();
}

double second_moment_limit(int n_modes, ModePair jl, ModePair mn) {
    if (jl == mn) return 1.0 / static_cast<double>(n_modes);
    return 0.0;
}

double fourth_moment_limit(int n_modes, ModePair p1, ModePair p2, ModePair p3, ModePair p4) {
    const double nn1 = static_cast<double>(n_modes) * static_cast<double>(n_modes + 1);
    const bool direct = (p1 == p2) && (p3 == p4);
    const bool crossed = (p1 == p4) && (p3 == p2);
    if (direct && crossed) return 2.0 / nn1;  // all four pairs coincide
    if (direct || crossed) return 1.0 / nn1;
    return 0.0;
}

double fourth_moment_limit_two_frequency(int n_modes, ModePair p1, ModePair p2, ModePair p3,
                                         ModePair p4) {
    const double n = static_cast<double>(n_modes);
    if (p1 == p2 && p3 == p4) return 1.0 / (n * n);
    return 0.0;
}

} // namespace wgmig
