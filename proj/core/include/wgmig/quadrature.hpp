#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace wgmig {

/// Composite Simpson weights on a uniform grid of `n` points (n odd, n >= 3)
/// with spacing `h`. Sum of weights equals (n-1)*h.
inline std::vector<double> simpson_weights(std::size_t n, double h) {
    if (n < 3 || n % 2 == 0)
        throw std::invalid_argument("simpson_weights: need an odd point count >= 3");
    std::vector<double> w(n, 0.0);
    const double c = h / 3.0;
    w.front() = c;
    w.back() = c;
    for (std::size_t i = 1; i + 1 < n; ++i) w[i] = (i % 2 == 1) ? 4.0 * c : 2.0 * c;
    return w;
}

/// Smallest odd point count whose spacing over [0,length] does not exceed `max_step`.
inline std::size_t simpson_points_for_step(double length, double max_step) {
    if (length <= 0.0 || max_step <= 0.0)
        throw std::invalid_argument("simpson_points_for_step: positive length and step required");
    std::size_t intervals = static_cast<std::size_t>(length / max_step);
    while (intervals * max_step < length) ++intervals;
    if (intervals % 2 == 1) ++intervals;
    if (intervals < 2) intervals = 2;
    return intervals + 1;
}

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule with `n` nodes on [lo, hi].
QuadratureRule gauss_legendre(std::size_t n, double lo, double hi);

} // namespace wgmig
