#include "wgmig/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "wgmig/errors.hpp"

namespace wgmig::acceptance {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

unsigned resolve_workers(unsigned requested) {
    return requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
}

// ---- pinned scenario parameters -------------------------------------------
//
// The moment propositions are eps -> 0 limits; at the desk scales below the
// product eps * sigma_nu is kept small enough that the observed bias stays
// inside the stated tolerances while a full criterion still runs in minutes.

Scenario base_scenario(double omega0) {
    Scenario sc;
    sc.waveguide = WaveguideSpec{1.0, 1.0, omega0};
    sc.source.kind = SourceSpec::Kind::time_harmonic;
    sc.source.position = 0.31;
    return sc;
}

} // namespace

Scenario transmission_scenario() {
    Scenario sc = base_scenario(5.5 * kPi);  // N = 5, lambda = 2/5.5
    const double lambda = sc.waveguide.wavelength();
    sc.medium.epsilon = 0.05;
    sc.medium.sigma_nu = 1.3;
    sc.medium.ell_z = 0.8 * lambda;
    sc.medium.ell_x = 0.8 * lambda;
    sc.reflector = Reflector{0.52, 2.0, 2e-3};
    sc.array = ArrayGeometry::full(sc.waveguide, lambda / 8.0);
    return sc;
}

Scenario imaging_scenario() {
    Scenario sc = base_scenario(40.5 * kPi);  // N = 40, lambda = 2/40.5
    const double lambda = sc.waveguide.wavelength();
    sc.medium.epsilon = 0.1;
    sc.medium.sigma_nu = 2.0;
    sc.medium.ell_z = lambda;
    sc.medium.ell_x = lambda;
    sc.reflector = Reflector{0.5, 3.0, 8e-5};
    sc.array = ArrayGeometry::full(sc.waveguide, lambda / 8.0);
    return sc;
}

Scenario broadband_scenario(double bandwidth) {
    Scenario sc = base_scenario(10.5 * kPi);  // N = 10, lambda = 2/10.5
    const double lambda = sc.waveguide.wavelength();
    sc.medium.epsilon = 0.05;
    sc.medium.sigma_nu = 2.0;
    sc.medium.ell_z = 0.9 * lambda;
    sc.medium.ell_x = 0.9 * lambda;
    sc.source.kind = SourceSpec::Kind::broadband;
    sc.source.alpha = 1.5;
    sc.source.bandwidth = bandwidth;
    sc.reflector = Reflector{0.5, 1.0, 5e-4};
    sc.array = ArrayGeometry::full(sc.waveguide, lambda / 8.0);
    return sc;
}

Scenario unitarity_scenario() {
    Scenario sc = base_scenario(10.5 * kPi);  // N = 10
    const double lambda = sc.waveguide.wavelength();
    sc.medium.epsilon = 0.05;
    sc.medium.sigma_nu = 1.0;
    sc.medium.ell_z = lambda;
    sc.medium.ell_x = lambda;
    sc.reflector = Reflector{0.5, 6.0 * lambda, 0.0};
    sc.array = ArrayGeometry::full(sc.waveguide, lambda / 8.0);
    sc.distance = 500.0 * lambda * sc.medium.epsilon * sc.medium.epsilon;
    return sc;
}

namespace {

// Broadband bandwidth pair for criterion 10 (baseband sigma of |f0|^2).
constexpr double kNarrowBandwidth = 5.0;
constexpr double kWideBandwidth = 20.0;

constexpr std::uint64_t kSeedTransmission = 0x5eed0001;
constexpr std::uint64_t kSeedImaging = 0x5eed0002;
constexpr std::uint64_t kSeedBroadband = 0x5eed0003;
constexpr std::uint64_t kSeedUnitarity = 0x5eed0004;
constexpr std::uint64_t kSeedDeterminism = 0x5eed0005;
constexpr std::uint64_t kSeedCoherence = 0x5eed0006;

struct SharedRuns {
    std::optional<EnsembleStats> transmission;
    std::optional<EnsembleStats> imaging;
    std::optional<EnsembleStats> broadband_narrow;
    std::optional<EnsembleStats> broadband_wide;
    double transmission_seconds = 0.0;
    double imaging_seconds = 0.0;
};

const EnsembleStats& transmission_stats(SharedRuns& shared, unsigned workers) {
    if (!shared.transmission) {
        const auto start = Clock::now();
        Scenario sc = transmission_scenario();
        const MomentModel model = sc.moment_model();
        const double leq = model.equip_distance;
        sc.distance = 3.0 * leq;

        EnsembleConfig config;
        config.realizations = 5000;
        config.seed = kSeedTransmission;
        config.workers = workers;
        config.scenario = sc;
        config.checkpoints = {leq, 2.0 * leq, 3.0 * leq};
        config.fourth_moment_pairs = {{ModePair{1, 1}, ModePair{1, 1}},
                                      {ModePair{2, 3}, ModePair{2, 3}},
                                      {ModePair{1, 1}, ModePair{2, 2}},
                                      {ModePair{1, 2}, ModePair{3, 4}}};
        const double lambda = sc.waveguide.wavelength();
        config.kirchhoff_grid = ImageGridSpec::centered(
            sc.reflector.position, sc.reflector.range, 0.75 * lambda, 0.75 * lambda,
            lambda / 8.0);
        config.probes = {{sc.reflector.position, sc.reflector.range},
                         {sc.reflector.position + lambda, sc.reflector.range},
                         {sc.reflector.position, sc.reflector.range + 1.5 * lambda}};
        shared.transmission = run_ensemble(config);
        shared.transmission_seconds = seconds_since(start);
    }
    return *shared.transmission;
}

const EnsembleStats& imaging_stats(SharedRuns& shared, unsigned workers) {
    if (!shared.imaging) {
        const auto start = Clock::now();
        Scenario sc = imaging_scenario();

        EnsembleConfig config;
        config.realizations = 2000;
        config.seed = kSeedImaging;
        config.workers = workers;
        config.scenario = sc;
        config.collect_transmission_moments = false;
        const double lambda = sc.waveguide.wavelength();
        config.probes = {{sc.reflector.position, sc.reflector.range},
                         {sc.reflector.position + 2.0 * lambda, sc.reflector.range},
                         {sc.reflector.position, sc.reflector.range + 3.0 * lambda}};
        shared.imaging = run_ensemble(config);
        shared.imaging_seconds = seconds_since(start);
    }
    return *shared.imaging;
}

const EnsembleStats& broadband_stats(SharedRuns& shared, unsigned workers, bool wide) {
    auto& slot = wide ? shared.broadband_wide : shared.broadband_narrow;
    if (!slot) {
        Scenario sc = broadband_scenario(wide ? kWideBandwidth : kNarrowBandwidth);
        EnsembleConfig config;
        config.realizations = 220;
        config.seed = kSeedBroadband + (wide ? 1 : 0);
        config.workers = workers;
        config.scenario = sc;
        config.collect_transmission_moments = false;
        const double lambda = sc.waveguide.wavelength();
        config.probes = {{sc.reflector.position, sc.reflector.range},
                         {sc.reflector.position + 2.0 * lambda, sc.reflector.range}};
        slot = run_ensemble(config);
    }
    return *slot;
}

Report criterion_1(unsigned workers) {
    const auto start = Clock::now();
    Report report;
    report.name = "criterion-1-unitarity";

    Scenario sc = unitarity_scenario();
    EnsembleConfig config;
    config.realizations = 25;
    config.seed = kSeedUnitarity;
    config.workers = workers;
    config.scenario = sc;
    config.waive_regime_checks = true;
    config.collect_mean_correlation = false;
    config.collect_transmission_moments = false;

    const auto run_start = Clock::now();
    const EnsembleStats stats = run_ensemble(config);
    const double per_realization =
        seconds_since(run_start) / static_cast<double>(config.realizations) *
        static_cast<double>(resolve_workers(workers));

    report.lines.push_back({"max unitarity defect over realizations", stats.max_unitarity_defect,
                            0.0, 0.0, 1e-8, stats.max_unitarity_defect <= 1e-8, ""});
    report.lines.push_back({"core-seconds per realization", per_realization, 0.0, 0.0, 1.0,
                            per_realization <= 1.0, ""});
    report.seconds = seconds_since(start);
    return report;
}

Report criterion_2(SharedRuns& shared, unsigned workers) {
    const auto start = Clock::now();
    const EnsembleStats& stats = transmission_stats(shared, workers);
    Report report = verify_transmission_moments(stats, transmission_scenario());
    report.name = "criterion-2-moment-limits";
    // drop the fourth-moment lines; criterion 4 reports them
    std::erase_if(report.lines,
                  [](const CheckLine& l) { return l.quantity.rfind("E[|T_", 0) == 0; });
    report.lines.push_back({"ensemble wall seconds", shared.transmission_seconds, 0.0, 0.0, 300.0,
                            shared.transmission_seconds <= 300.0, "criterion budget 5 min"});
    report.seconds = seconds_since(start);
    return report;
}

Report criterion_3(SharedRuns& shared, unsigned workers) {
    const auto start = Clock::now();
    const EnsembleStats& stats = transmission_stats(shared, workers);
    Report report = verify_coupled_power_match(stats, transmission_scenario());
    report.name = "criterion-3-coupled-power";
    report.seconds = seconds_since(start);
    return report;
}

Report criterion_4(SharedRuns& shared, unsigned workers) {
    const auto start = Clock::now();
    const EnsembleStats& stats = transmission_stats(shared, workers);
    Report full = verify_transmission_moments(stats, transmission_scenario());
    Report report;
    report.name = "criterion-4-fourth-moments";
    for (auto& line : full.lines)
        if (line.quantity.rfind("E[|T_", 0) == 0) report.lines.push_back(line);
    report.seconds = seconds_since(start);
    return report;
}

Report criterion_5(SharedRuns& shared, unsigned workers) {
    const auto start = Clock::now();
    const EnsembleStats& stats = transmission_stats(shared, workers);
    Report report = verify_kirchhoff_failure(stats);
    report.name = "criterion-5-kirchhoff-failure";
    report.seconds = seconds_since(start);
    return report;
}

Report criterion_6(SharedRuns& shared, unsigned workers) {
    const auto start = Clock::now();
    const EnsembleStats& stats = imaging_stats(shared, workers);
    const Scenario sc = imaging_scenario();
    const ModeBasis basis = sc.make_basis();
    const double lambda = basis.wavelength();

    Report report;
    report.name = "criterion-6-resolution";
    if (!stats.mean_correlation) throw Error("criterion 6: mean correlation missing");

    // Full-aperture mean image peaks at the reflector within half a cell.
    {
        const CorrelationImager imager =
            CorrelationImager::full_aperture(*stats.mean_correlation, basis);
        const double step = lambda / 8.0;
        const ImageGridSpec grid = ImageGridSpec::centered(
            sc.reflector.position, sc.reflector.range, 1.5 * lambda, 1.5 * lambda, step);
        const ImagePeak peak = imager.image(grid).argmax();
        const double offset = std::max(std::abs(peak.x - sc.reflector.position),
                                       std::abs(peak.z - sc.reflector.range));
        report.lines.push_back({"mean FA peak offset from reflector", offset, 0.0, 0.0,
                                0.5 * step, offset <= 0.5 * step * (1.0 + 1e-9), ""});
    }

    // Limited-aperture widths: first zero against the transverse point
    // spread profile, agreement across apertures.
    const double target_width = 3.8317059702075123 * lambda / (2.0 * kPi);
    std::vector<double> widths;
    for (const double fraction : {1.0, 0.5, 0.2}) {
        const double half = 0.5 * fraction * sc.waveguide.width;
        ArrayGeometry aperture = ArrayGeometry::interval(0.5 * sc.waveguide.width - half,
                                                         0.5 * sc.waveguide.width + half,
                                                         lambda / 8.0);
        const CorrelationImager imager =
            CorrelationImager::limited_aperture(*stats.mean_correlation, aperture, basis);
        ImageGridSpec slice;
        slice.z = {sc.reflector.range};
        const std::size_t count = 2 * static_cast<std::size_t>(1.2 * lambda / (lambda / 32.0)) + 1;
        slice.x.resize(count);
        for (std::size_t i = 0; i < count; ++i)
            slice.x[i] = sc.reflector.position - 1.2 * lambda +
                         static_cast<double>(i) * (lambda / 32.0);
        const ImageGrid image = imager.image(slice);
        std::vector<double> profile(count);
        for (std::size_t i = 0; i < count; ++i)
            profile[i] = image.values(static_cast<Eigen::Index>(i), 0);
        widths.push_back(first_zero_half_width(slice.x, profile, count / 2));
    }
    const double rel_err = std::abs(widths.front() - target_width) / target_width;
    report.lines.push_back({"LA cross-range first-zero half width (full aperture)",
                            widths.front(), 0.0, target_width, 0.10 * target_width,
                            rel_err <= 0.10, "target 3.8317 / k"});
    const double spread = (*std::max_element(widths.begin(), widths.end()) -
                           *std::min_element(widths.begin(), widths.end())) /
                          *std::min_element(widths.begin(), widths.end());
    report.lines.push_back({"LA width spread across apertures {1, 0.5, 0.2}a", spread, 0.0, 0.0,
                            0.15, spread <= 0.15, ""});
    report.seconds = seconds_since(start);
    return report;
}

Report criterion_7() {
    const auto start = Clock::now();
    Report report;
    report.name = "criterion-7-psf-constants";
    const double target = kPi * kPi / 4.0;
    const double h0 = cross_range_psf(0.0);
    const double g0 = range_psf(0.0);
    report.lines.push_back(
        {"cross-range psf at 0", h0, 0.0, target, 1e-8, std::abs(h0 - target) <= 1e-8, ""});
    report.lines.push_back(
        {"range psf at 0", g0, 0.0, target, 1e-8, std::abs(g0 - target) <= 1e-8, ""});

    // First zero of the cross-range profile vs the Bessel root by bisection.
    double lo = 3.0, hi = 4.5;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (std::cyl_bessel_j(1, lo) * std::cyl_bessel_j(1, mid) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    const double bessel_root = 0.5 * (lo + hi);
    lo = 3.0;
    hi = 4.5;
    const auto signed_psf = [](double xi) {
        return std::cyl_bessel_j(1, xi) / xi;  // h = pi^2 (J1/xi)^2; zero where J1 is
    };
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (signed_psf(lo) * signed_psf(mid) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    const double psf_root = 0.5 * (lo + hi);
    report.lines.push_back({"first zero of cross-range psf", psf_root, 0.0, bessel_root, 1e-6,
                            std::abs(psf_root - bessel_root) <= 1e-6, ""});
    report.seconds = seconds_since(start);
    return report;
}

Report criterion_8(SharedRuns& shared, unsigned workers) {
    const auto start = Clock::now();
    const EnsembleStats& stats = imaging_stats(shared, workers);
    const Scenario sc = imaging_scenario();
    const ModeBasis basis = sc.make_basis();

    Report report;
    report.name = "criterion-8-peak-amplitude";
    const ProbeSeries& peak = stats.probes.front();
    const double estimate = peak.mean();
    const double target = peak_amplitude_continuum(basis, sc.reflector.strength);
    const bool pass = std::abs(estimate - target) <= 0.15 * target;
    report.lines.push_back({"mean FA value at reflector vs continuum peak", estimate,
                            peak.stderr_of_mean(), target, 0.15 * target, pass, ""});

    const double phim1 = intensity_moment(basis, -1, sc.source.position);
    const double phi0 = intensity_moment(basis, 0, sc.reflector.position);
    const double omega = basis.omega();
    const double discrete =
        omega * omega * sc.reflector.strength / 4.0 * phim1 * phi0 * phi0;
    report.lines.push_back({"mean FA value at reflector vs finite-N mean", estimate,
                            peak.stderr_of_mean(), discrete, 0.15 * discrete,
                            std::abs(estimate - discrete) <= 0.15 * discrete, ""});
    report.seconds = seconds_since(start);
    return report;
}

Report criterion_9(SharedRuns& shared, unsigned workers) {
    const auto start = Clock::now();
    const EnsembleStats& stats = imaging_stats(shared, workers);
    Report report = verify_variance_at_peak(stats, imaging_scenario(), 0.20);
    report.name = "criterion-9-variance-at-peak";
    report.seconds = seconds_since(start);
    return report;
}

Report criterion_10(SharedRuns& shared, unsigned workers) {
    const auto start = Clock::now();
    const Scenario narrow = broadband_scenario(kNarrowBandwidth);
    const Scenario wide = broadband_scenario(kWideBandwidth);

    // Coherence radius at the carrier of the same physical scenario.
    Scenario carrier = narrow;
    carrier.source.kind = SourceSpec::Kind::time_harmonic;
    std::vector<double> offsets;
    for (double d = 0.004; d <= 0.24; d *= 1.5) offsets.push_back(d);
    const CoherenceCurve curve = estimate_coherence_radius(
        carrier, 160, offsets, kSeedCoherence, resolve_workers(workers));

    const EnsembleStats& stats_narrow = broadband_stats(shared, workers, false);
    const EnsembleStats& stats_wide = broadband_stats(shared, workers, true);

    Report report = verify_broadband_stabilization(stats_narrow, stats_wide, narrow, wide,
                                                   curve.radius > 0 ? curve.radius : 1e9);
    report.name = "criterion-10-broadband-stabilization";
    report.lines.push_back({"estimated coherence radius", curve.radius, 0.0, 0.0, 0.0,
                            curve.radius > 0.0, "first 1/2 crossing of |corr|"});
    report.seconds = seconds_since(start);
    return report;
}

std::string stats_fingerprint(const EnsembleStats& stats) {
    std::ostringstream out;
    out.precision(17);
    for (const auto& probe : stats.probes)
        for (double v : probe.values) out << v << "\n";
    if (stats.mean_correlation)
        for (const auto& s : stats.mean_correlation->samples())
            for (Eigen::Index i = 0; i < s.total.size(); ++i)
                out << s.total(i).real() << " " << s.total(i).imag() << "\n";
    for (const auto& table : stats.moments)
        for (Eigen::Index i = 0; i < table.mean_power.size(); ++i) out << table.mean_power(i)
                                                                       << "\n";
    return out.str();
}

Report criterion_11(unsigned) {
    const auto start = Clock::now();
    Report report;
    report.name = "criterion-11-determinism";

    Scenario sc = transmission_scenario();
    sc.distance = 0.0;
    sc.equip_multiple = 0.5;  // short section keeps this cheap

    EnsembleConfig config;
    config.realizations = 6;
    config.seed = kSeedDeterminism;
    config.scenario = sc;
    config.waive_regime_checks = true;
    config.probes = {{sc.reflector.position, sc.reflector.range}};

    config.workers = 1;
    const std::string one = stats_fingerprint(run_ensemble(config));
    config.workers = 2;
    const std::string two = stats_fingerprint(run_ensemble(config));
    config.workers = 1;
    const std::string replay = stats_fingerprint(run_ensemble(config));

    report.lines.push_back({"1-worker vs 2-worker payload bytes", one == two ? 0.0 : 1.0, 0.0,
                            0.0, 0.0, one == two, "byte comparison of all collected numbers"});
    report.lines.push_back({"re-run replay payload bytes", one == replay ? 0.0 : 1.0, 0.0, 0.0,
                            0.0, one == replay, ""});
    report.seconds = seconds_since(start);
    return report;
}

} // namespace

std::vector<Report> run(const Options& options) {
    std::vector<int> wanted = options.criteria;
    if (wanted.empty()) wanted = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
    const unsigned workers = options.workers;

    SharedRuns shared;
    std::vector<Report> reports;
    for (int c : wanted) {
        switch (c) {
            case 1: reports.push_back(criterion_1(workers)); break;
            case 2: reports.push_back(criterion_2(shared, workers)); break;
            case 3: reports.push_back(criterion_3(shared, workers)); break;
            case 4: reports.push_back(criterion_4(shared, workers)); break;
            case 5: reports.push_back(criterion_5(shared, workers)); break;
            case 6: reports.push_back(criterion_6(shared, workers)); break;
            case 7: reports.push_back(criterion_7()); break;
            case 8: reports.push_back(criterion_8(shared, workers)); break;
            case 9: reports.push_back(criterion_9(shared, workers)); break;
            case 10: reports.push_back(criterion_10(shared, workers)); break;
            case 11: reports.push_back(criterion_11(workers)); break;
            default: throw std::invalid_argument("unknown acceptance criterion");
        }
    }
    return reports;
}

} // namespace wgmig::acceptance
