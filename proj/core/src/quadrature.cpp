#include "wgmig/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Dense>

namespace wgmig {

namespace {

// Golub-Welsch on [-1, 1]: nodes are eigenvalues of the Jacobi matrix,
// weights come from the squared first components of the eigenvectors.
QuadratureRule reference_rule(std::size_t n) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                   static_cast<Eigen::Index>(n));
    for (std::size_t i = 1; i < n; ++i) {
        const double k = static_cast<double>(i);
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(i)) = b;
        jacobi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);

    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        rule.nodes[i] = solver.eigenvalues()(idx);
        const double v0 = solver.eigenvectors()(0, idx);
        rule.weights[i] = 2.0 * v0 * v0;
    }
    return rule;
}

const QuadratureRule& cached_reference_rule(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, QuadratureRule> cache;
    std::scoped_lock lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, reference_rule(n)).first;
    return it->second;
}

} // namespace

QuadratureRule gauss_legendre(std::size_t n, double lo, double hi) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
    const QuadratureRule& ref = cached_reference_rule(n);
    QuadratureRule rule = ref;
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < n; ++i) {
        rule.nodes[i] = mid + half * ref.nodes[i];
        rule.weights[i] = ref.weights[i] * half;
    }
    return rule;
}

} // namespace wgmig
