#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wgmig/correlation.hpp"
#include "wgmig/imaging.hpp"
#include "wgmig/io.hpp"
#include "wgmig/moments.hpp"

namespace wgmig {

/// All physical parameters of one experiment.
struct Scenario {
    WaveguideSpec waveguide;
    MediumSpec medium;
    SourceSpec source;
    Reflector reflector;
    ArrayGeometry array;

    double distance = 0.0;        ///< normalized L; <= 0 resolves to equip_multiple * L_equip
    double equip_multiple = 3.0;  ///< auto-distance factor
    double step = 0.0;            ///< physical integration step; <= 0 resolves to the limit
    std::size_t broadband_nodes = 64;
    double broadband_span = 4.0;  ///< baseband grid half-span in envelope sigmas

    ModeBasis make_basis() const { return ModeBasis(waveguide); }
    MomentModel moment_model() const;
    /// min(ell_z, shortest beat length) / 8.
    double step_limit(const ModeBasis& basis) const;
    double resolved_distance(const MomentModel& model) const;
    double resolved_step(const ModeBasis& basis) const;
    void validate() const;
};

struct ProbePoint {
    double x = 0.0;
    double z = 0.0;
};

/// What to run and what to record.
struct EnsembleConfig {
    std::size_t realizations = 0;
    std::uint64_t seed = 0;
    unsigned workers = 0;  ///< 0 = hardware concurrency
    Scenario scenario;
    bool waive_regime_checks = false;

    /// Normalized distances at which transmission moments are tabulated
    /// (time-harmonic scenarios); the final distance is always included.
    std::vector<double> checkpoints;
    /// Fourth-moment statistics |T_p1|^2 |T_p2|^2 to accumulate.
    std::vector<std::pair<ModePair, ModePair>> fourth_moment_pairs;
    bool collect_transmission_moments = true;
    bool collect_mean_correlation = true;
    /// Kirchhoff mean/variance over this grid (time-harmonic only).
    std::optional<ImageGridSpec> kirchhoff_grid;
    /// Per-realization full-aperture functional values at these points.
    std::vector<ProbePoint> probes;
    /// Realization counts at which running statistics are snapshotted.
    std::vector<std::size_t> snapshots;

    void validate() const;
};

struct MomentTable {
    double distance = 0.0;
    std::size_t count = 0;
    Eigen::MatrixXcd mean_t;
    Eigen::MatrixXd stderr_t;      ///< complex stderr sqrt((VarRe + VarIm)/M)
    Eigen::MatrixXd mean_power;    ///< E[|T_jl|^2]
    Eigen::MatrixXd stderr_power;
};

struct FourthMomentStat {
    ModePair p1, p2;
    double mean = 0.0;
    double stderr_value = 0.0;
};

struct ProbeSeries {
    ProbePoint point;
    std::vector<double> values;

    double mean() const;
    double variance() const;  ///< unbiased
    double stderr_of_mean() const;
};

struct KirchhoffStats {
    ImageGridSpec grid;
    Eigen::MatrixXcd mean;
    Eigen::MatrixXd stderr_mean;   ///< stderr of the complex mean per node
    Eigen::MatrixXd mean_power;    ///< E[|I_KM|^2]
    Eigen::MatrixXd stderr_power;
    Eigen::MatrixXd rms;           ///< sqrt(E[|I_KM|^2])
};

struct CoherenceCurve {
    std::vector<double> offsets;      ///< frequency separations (rad/time)
    std::vector<double> correlation;  ///< mean |corr| over (j, l)
    double radius = 0.0;              ///< first |corr| = 1/2 crossing; 0 if not reached
};

struct EnsembleSnapshot {
    std::size_t realizations = 0;
    std::optional<ModalCorrelation> mean_correlation;
    std::vector<ProbeSeries> probes;
};

struct EnsembleStats {
    std::size_t realizations = 0;
    double distance = 0.0;
    double step = 0.0;
    double equip_distance = 0.0;
    double max_unitarity_defect = 0.0;
    double max_rowsum_deviation = 0.0;
    double mean_born_ratio = 0.0;
    std::vector<std::string> warnings;

    std::vector<MomentTable> moments;  ///< one per checkpoint, ascending distance
    std::vector<FourthMomentStat> fourth_moments;
    std::optional<ModalCorrelation> mean_correlation;
    std::optional<KirchhoffStats> kirchhoff;
    std::vector<ProbeSeries> probes;
    std::optional<CoherenceCurve> coherence;  ///< broadband runs
    std::vector<EnsembleSnapshot> snapshots;
};

/// Runs the ensemble: sample medium -> propagate -> synthesize fields ->
/// correlate -> accumulate. Deterministic for a fixed (config, seed)
/// regardless of worker count; a failing realization aborts with its index.
EnsembleStats run_ensemble(const EnsembleConfig& config);

/// Bootstrap confidence interval (percentile) and standard error of a
/// statistic of an i.i.d. sample.
struct BootstrapResult {
    double estimate = 0.0;
    double stderr_value = 0.0;
    double lo = 0.0;  ///< 2.5 %
    double hi = 0.0;  ///< 97.5 %
};
BootstrapResult bootstrap_statistic(const std::vector<double>& series,
                                    const std::function<double(const std::vector<double>&)>& stat,
                                    std::size_t resamples, std::uint64_t seed);
BootstrapResult bootstrap_variance(const std::vector<double>& series, std::size_t resamples,
                                   std::uint64_t seed);

/// Transmission-moment verification against the equipartition limits:
/// |E[T]| compatible with 0, E[|T|^2] with 1/N, fourth moments with the
/// one-frequency limit table, plus per-realization unitarity.
Report verify_transmission_moments(const EnsembleStats& stats, const Scenario& scenario);

/// Monte Carlo E[|T_jl|^2](z) against the coupled-power solution at each
/// checkpoint, three-standard-error tolerance per entry.
Report verify_coupled_power_match(const EnsembleStats& stats, const Scenario& scenario);

/// Kirchhoff failure: per-node ensemble mean compatible with zero while
/// per-realization magnitudes stay order one.
Report verify_kirchhoff_failure(const EnsembleStats& stats);

/// Variance of the full-aperture functional at the reflector against the
/// closed-form ratio 1/2 + pi^2/16, with a bootstrap CI. Probe 0 must sit
/// at the reflector.
Report verify_variance_at_peak(const EnsembleStats& stats, const Scenario& scenario,
                               double ratio_tolerance = 0.2);

/// Broadband stabilization: peak-variance ratio across two bandwidths within
/// [lo, hi] of the bandwidth ratio, unchanged mean-image peak and width.
Report verify_broadband_stabilization(const EnsembleStats& narrow, const EnsembleStats& wide,
                                      const Scenario& narrow_scenario,
                                      const Scenario& wide_scenario, double omega_c);

/// Frequency coherence radius by Monte Carlo: first offset at which the
/// mean transmission-coefficient correlation drops below 1/2.
CoherenceCurve estimate_coherence_radius(const Scenario& scenario, std::size_t realizations,
                                         const std::vector<double>& offsets, std::uint64_t seed,
                                         unsigned workers);

} // namespace wgmig
