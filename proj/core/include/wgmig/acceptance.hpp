#pragma once

#include <vector>

#include "wgmig/io.hpp"
#include "wgmig/montecarlo.hpp"

namespace wgmig::acceptance {

/// Desk-scale verification suite. Every tolerance is pinned here; the
/// reports print one line per checked quantity.
///
/// Criteria:
///   1  propagator unitarity and speed
///   2  first/second transmission-moment limits
///   3  Monte Carlo vs coupled-power curves
///   4  fourth-moment limits
///   5  Kirchhoff migration failure
///   6  correlation-image resolution (peak location, widths, apertures)
///   7  point-spread constants
///   8  mean peak amplitude
///   9  time-harmonic variance at the peak
///  10  broadband stabilization
///  11  determinism across worker counts
struct Options {
    std::vector<int> criteria;  ///< empty = all
    unsigned workers = 0;       ///< 0 = hardware concurrency
};

std::vector<Report> run(const Options& options);

/// Scenario factories shared with tests and the CLI.
Scenario transmission_scenario();   ///< N = 5 moment study
Scenario imaging_scenario();        ///< N = 40 resolution study
Scenario broadband_scenario(double bandwidth);  ///< N = 10 stabilization study
Scenario unitarity_scenario();      ///< N = 10 with a 500-wavelength section

} // namespace wgmig::acceptance
