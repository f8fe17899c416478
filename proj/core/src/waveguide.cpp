#include "wgmig/waveguide.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wgmig {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void WaveguideSpec::validate() const {
    if (width <= 0.0) throw std::invalid_argument("WaveguideSpec: width must be > 0");
    if (sound_speed <= 0.0) throw std::invalid_argument("WaveguideSpec: sound_speed must be > 0");
    if (omega0 <= 0.0) throw std::invalid_argument("WaveguideSpec: omega0 must be > 0");
    mode_count(omega0, *this);
}

double WaveguideSpec::wavelength() const { return 2.0 * kPi * sound_speed / omega0; }

int mode_count(double omega, const WaveguideSpec& spec) {
    if (omega <= 0.0) throw std::invalid_argument("mode_count: omega must be > 0");
    if (spec.width <= 0.0 || spec.sound_speed <= 0.0)
        throw std::invalid_argument("mode_count: invalid waveguide geometry");
    const int n = static_cast<int>(std::floor(omega * spec.width / (kPi * spec.sound_speed)));
    if (n < 1)
        throw NoPropagatingModesError("no propagating modes at omega=" + std::to_string(omega));
    return n;
}

double mode_eval(int j, double x, const WaveguideSpec& spec) {
    if (j < 1) throw std::invalid_argument("mode_eval: mode index must be >= 1");
    if (x < 0.0 || x > spec.width)
        throw std::out_of_range("mode_eval: x outside the transverse section");
    const double a = spec.width;
    return std::sqrt(2.0 / a) * std::sin(kPi * static_cast<double>(j) * x / a);
}

ModeBasis::ModeBasis(const WaveguideSpec& spec, double omega) : spec_(spec), omega_(omega) {
    spec_.validate();
    const int n = mode_count(omega, spec_);
    k_ = omega / spec_.sound_speed;
    const double k2 = k_ * k_;
    lambda_.reserve(n);
    beta_.reserve(n);
    beta_prime_.reserve(n);
    for (int j = 1; j <= n; ++j) {
        const double mu = kPi * static_cast<double>(j) / spec_.width;
        const double lam = mu * mu;
        const double b2 = k2 - lam;
        if (b2 <= 0.0) break;  // mode exactly at cutoff: excluded
        lambda_.push_back(lam);
        beta_.push_back(std::sqrt(b2));
        beta_prime_.push_back(omega / (spec_.sound_speed * spec_.sound_speed * beta_.back()));
    }
    if (beta_.empty())
        throw NoPropagatingModesError("ModeBasis: no mode with positive axial wavenumber");
}

double ModeBasis::wavelength() const { return 2.0 * kPi / k_; }

void ModeBasis::check_index(int j) const {
    if (j < 1) throw std::invalid_argument("ModeBasis: mode index must be >= 1");
    if (j > count())
        throw EvanescentModeError("mode " + std::to_string(j) + " is not propagating (N=" +
                                  std::to_string(count()) + ")");
}

double ModeBasis::eigenvalue(int j) const {
    check_index(j);
    return lambda_[static_cast<std::size_t>(j - 1)];
}

double ModeBasis::wavenumber(int j) const {
    check_index(j);
    return beta_[static_cast<std::size_t>(j - 1)];
}

double ModeBasis::wavenumber_derivative(int j) const {
    check_index(j);
    return beta_prime_[static_cast<std::size_t>(j - 1)];
}

double ModeBasis::mode(int j, double x) const {
    check_index(j);
    return mode_eval(j, x, spec_);
}

double wavenumber(int j, double omega, const WaveguideSpec& spec) {
    if (j < 1) throw std::invalid_argument("wavenumber: mode index must be >= 1");
    const int n = mode_count(omega, spec);
    if (j > n)
        throw EvanescentModeError("wavenumber: mode " + std::to_string(j) +
                                  " is evanescent at this frequency");
    const double k = omega / spec.sound_speed;
    const double mu = kPi * static_cast<double>(j) / spec.width;
    const double b2 = k * k - mu * mu;
    if (b2 <= 0.0)
        throw CutoffModeError("wavenumber: mode " + std::to_string(j) + " is at cutoff");
    return std::sqrt(b2);
}

double beta_prime(int j, double omega, const WaveguideSpec& spec) {
    const double b = wavenumber(j, omega, spec);
    return omega / (spec.sound_speed * spec.sound_speed * b);
}

} // namespace wgmig
