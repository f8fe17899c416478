#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wgmig/medium.hpp"
#include "wgmig/waveguide.hpp"

namespace wgmig {

/// Index pair (j, l) into the transmission matrix, 1-based.
struct ModePair {
    int j = 1;
    int l = 1;
    bool operator==(const ModePair&) const = default;
};

/// Asymptotic moment model of the transmission coefficients.
///
/// gamma drives the coupled mean-power system
///   d P_j / dz = sum_{n != j} gamma_jn (P_n - P_j),
/// and equip_distance = 1 / |second eigenvalue| of its generator sets the
/// e^{-L / L_equip} relaxation envelope towards the uniform distribution.
///
/// The coherent damping rates D_j and pairwise decoherence rates Q_jl have
/// no closed form here; estimate_decay_rates() in the ensemble driver fills
/// them by regression when they are needed.
struct MomentModel {
    Eigen::MatrixXd gamma;          ///< symmetric, nonnegative off-diagonal (1/length)
    double equip_distance = 0.0;    ///< normalized length scale L_equip
    std::optional<Eigen::VectorXd> coherent_decay;       ///< D_j (1/length)
    std::optional<Eigen::MatrixXd> pair_decoherence;     ///< Q_jl (1/length)
};

/// Mode-coupling rate matrix under the separable-kernel closure
///   gamma_jn = k^4 / (4 beta_j beta_n) * psd_jn(beta_j - beta_n), j != n,
/// with zero diagonal (the difference form of the power system never reads it).
Eigen::MatrixXd gamma_matrix(const MediumSpec& medium, const ModeBasis& basis);

/// Equipartition distance from the spectral gap of the coupled-power
/// generator. Throws NoEquipartitionError when the coupling graph is
/// reducible (gap numerically zero).
double equipartition_distance(const Eigen::MatrixXd& gamma);

/// Builds the model (gamma + L_equip) for a scenario.
MomentModel make_moment_model(const MediumSpec& medium, const ModeBasis& basis);

/// Mean mode powers P_j(L) for launch mode l (1-based), initial condition
/// delta_jl, via the exact matrix exponential of the generator.
Eigen::VectorXd coupled_power_solve(const MomentModel& model, double distance, int launch_mode);

/// P curves at several distances in one factorization.
std::vector<Eigen::VectorXd> coupled_power_curve(const MomentModel& model,
                                                 std::span<const double> distances,
                                                 int launch_mode);

/// Limit of E[T_jl conj(T_mn)] for L >> L_equip: 1/N on matching pairs,
/// zero otherwise.
double second_moment_limit(int n_modes, ModePair jl, ModePair mn);

/// Limit of E[conj(T_{p1}) T_{p2} conj(T_{p3}) T_{p4}] at a single frequency
/// for L >> L_equip: 2/(N(N+1)) when all four pairs coincide, 1/(N(N+1)) for
/// the two distinct matched pairings, zero otherwise.
double fourth_moment_limit(int n_modes, ModePair p1, ModePair p2, ModePair p3, ModePair p4);

/// Same expectation with the last two factors at a shifted frequency:
/// 1/N^2 when both same-frequency pairs match, zero otherwise.
double fourth_moment_limit_two_frequency(int n_modes, ModePair p1, ModePair p2, ModePair p3,
                                         ModePair p4);

/// Exact equipartition limit of E[|T_p1|^2 |T_p2|^2] from the invariant
/// unitary ensemble: 2/(N(N+1)) on equal pairs, 1/(N(N+1)) when the pairs
/// share a row or a column, 1/(N^2 - 1) when fully disjoint. The limit-table
/// value 1/(N(N+1)) quoted for all distinct pairs is only the O(1/N^2)
/// approximation of the disjoint case.
double power_product_limit_exact(int n_modes, ModePair p1, ModePair p2);

} // namespace wgmig
