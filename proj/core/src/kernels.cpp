#include "wgmig/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace wgmig {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double intensity_moment(const ModeBasis& basis, int order, double x) {
    const int n = basis.count();
    double sum = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double phi = basis.mode(j, x);
        sum += std::pow(basis.wavenumber(j), order) * phi * phi;
    }
    return sum / static_cast<double>(n);
}

std::complex<double> migration_kernel(const ModeBasis& basis, double x_search, double z_search,
                                      double x_ref, double z_ref) {
    const int n = basis.count();
    std::complex<double> sum = 0.0;
    for (int j = 1; j <= n; ++j)
        sum += basis.mode(j, x_ref) * basis.mode(j, x_search) *
               std::polar(1.0, basis.wavenumber(j) * (z_ref - z_search));
    return sum / static_cast<double>(n);
}

double intensity_moment_continuum(const ModeBasis& basis, int order) {
    const double a = basis.spec().width;
    const double k = basis.wavenumber_total();
    switch (order) {
        case -1: return kPi / (2.0 * a * k);
        case 0: return 1.0 / a;
        case 1: return kPi * k / (4.0 * a);
        default: throw std::invalid_argument("intensity_moment_continuum: order must be -1, 0, 1");
    }
}

} // namespace wgmig
