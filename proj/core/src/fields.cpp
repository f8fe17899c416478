#include "wgmig/fields.hpp"

#include <cmath>
#include <stdexcept>

#include "wgmig/quadrature.hpp"

namespace wgmig {

using cplx = std::complex<double>;

void Reflector::validate(const WaveguideSpec& wg) const {
    if (position <= 0.0 || position >= wg.width)
        throw std::invalid_argument("Reflector: position must lie strictly inside (0, a)");
    if (range <= 0.0) throw std::invalid_argument("Reflector: range must be > 0");
    if (strength < 0.0) throw std::invalid_argument("Reflector: strength must be >= 0");
}

std::vector<std::string> Reflector::warnings(const ModeBasis& basis, double epsilon) const {
    std::vector<std::string> out;
    const double lambda = basis.wavelength();
    if (range < 5.0 * lambda)
        out.push_back("reflector range below 5 wavelengths; evanescent coupling not modeled");
    if (range * epsilon * epsilon > 0.1)
        out.push_back("reflector range is not small against the random-section scale");
    return out;
}

ArrayGeometry ArrayGeometry::interval(double a1, double a2, double max_spacing) {
    if (!(a2 > a1)) throw std::invalid_argument("ArrayGeometry: aperture is degenerate");
    if (max_spacing <= 0.0) throw std::invalid_argument("ArrayGeometry: spacing must be > 0");
    const std::size_t n = simpson_points_for_step(a2 - a1, max_spacing);
    ArrayGeometry g;
    g.lo = a1;
    g.hi = a2;
    g.positions.resize(n);
    const double h = (a2 - a1) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g.positions[i] = a1 + h * static_cast<double>(i);
    g.positions.back() = a2;
    return g;
}

ArrayGeometry ArrayGeometry::full(const WaveguideSpec& wg, double max_spacing) {
    return interval(0.0, wg.width, max_spacing);
}

void ArrayGeometry::validate(const WaveguideSpec& wg) const {
    if (lo < 0.0 || hi > wg.width || !(lo < hi))
        throw std::invalid_argument("ArrayGeometry: aperture must satisfy 0 <= a1 < a2 <= a");
    if (positions.size() < 3 || positions.size() % 2 == 0)
        throw std::invalid_argument("ArrayGeometry: need an odd receiver count >= 3");
    const double lambda = wg.wavelength();
    if (spacing() > lambda / 4.0 * (1.0 + 1e-9))
        throw std::invalid_argument("ArrayGeometry: receiver spacing exceeds lambda/4");
}

bool ArrayGeometry::covers_full_section(const WaveguideSpec& wg, double tol) const {
    return lo <= tol && hi >= wg.width - tol;
}

double ArrayGeometry::spacing() const {
    if (positions.size() < 2) throw std::invalid_argument("ArrayGeometry: too few receivers");
    return (positions.back() - positions.front()) / static_cast<double>(positions.size() - 1);
}

std::vector<double> ArrayGeometry::quadrature_weights() const {
    return simpson_weights(positions.size(), spacing());
}

ModalField primary_modal_data(const PropagatorMatrix& t, const SourceSpec& source,
                              const ModeBasis& basis) {
    if (t.mode_count() != basis.count())
        throw std::invalid_argument("primary_modal_data: propagator/basis mode mismatch");
    const double array_plane = t.distance / (t.epsilon * t.epsilon);
    const Eigen::VectorXcd through = t.matrix * initial_amplitudes(source, basis.omega(), basis);

    ModalField field;
    field.omega = basis.omega();
    field.direction = ModalField::Direction::rightgoing;
    field.array_plane = array_plane;
    field.valid_from = array_plane;
    field.valid_to = array_plane + 1.0 / (t.epsilon * t.epsilon);
    field.amplitude.resize(basis.count());
    for (int j = 1; j <= basis.count(); ++j) {
        const double beta = basis.wavenumber(j);
        field.amplitude(j - 1) =
            std::polar(1.0, beta * array_plane) / std::sqrt(beta) * through(j - 1);
    }
    return field;
}

std::complex<double> reflector_illumination(const PropagatorMatrix& t, const SourceSpec& source,
                                            const Reflector& reflector, const ModeBasis& basis) {
    reflector.validate(basis.spec());
    const double array_plane = t.distance / (t.epsilon * t.epsilon);
    const double reflector_plane = array_plane + reflector.range;
    const Eigen::VectorXcd through =
        t.matrix * (cplx(0.0, 2.0) * initial_amplitudes(source, basis.omega(), basis));

    const double omega = basis.omega();
    cplx q = 0.0;
    for (int l = 1; l <= basis.count(); ++l) {
        const double beta = basis.wavenumber(l);
        q += basis.mode(l, reflector.position) / std::sqrt(beta) *
             std::polar(1.0, beta * reflector_plane) * through(l - 1);
    }
    return 0.25 * omega * omega * reflector.strength * q;
}

ModalField secondary_modal_data(const PropagatorMatrix& t, const SourceSpec& source,
                                const Reflector& reflector, const ModeBasis& basis) {
    const double array_plane = t.distance / (t.epsilon * t.epsilon);
    const cplx q = reflector_illumination(t, source, reflector, basis);

    ModalField field;
    field.omega = basis.omega();
    field.direction = ModalField::Direction::leftgoing;
    field.array_plane = array_plane;
    field.valid_from = array_plane;
    field.valid_to = array_plane + reflector.range;
    field.amplitude.resize(basis.count());
    for (int j = 1; j <= basis.count(); ++j) {
        const double beta = basis.wavenumber(j);
        field.amplitude(j - 1) =
            basis.mode(j, reflector.position) / beta * std::polar(1.0, beta * reflector.range) * q;
    }
    return field;
}

std::complex<double> field_at(double x, double z, const ModalField& field,
                              const ModeBasis& basis) {
    if (field.mode_count() != basis.count())
        throw std::invalid_argument("field_at: modal data/basis mode mismatch");
    if (x < 0.0 || x > basis.spec().width)
        throw std::out_of_range("field_at: x outside the transverse section");
    if (z < field.valid_from - 1e-12 || z >= field.valid_to)
        throw std::out_of_range("field_at: z outside the field's validity window");

    const double sign = field.direction == ModalField::Direction::rightgoing ? 1.0 : -1.0;
    cplx value = 0.0;
    for (int j = 1; j <= basis.count(); ++j) {
        const double beta = basis.wavenumber(j);
        value += basis.mode(j, x) * field.amplitude(j - 1) *
                 std::polar(1.0, sign * beta * (z - field.array_plane));
    }
    return value;
}

} // namespace wgmig
