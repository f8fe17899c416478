#pragma once

#include <stdexcept>
#include <string>

namespace wgmig {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Requested frequency supports no propagating modes.
struct NoPropagatingModesError : Error {
    using Error::Error;
};

/// Mode index refers to a mode exactly at cutoff (zero axial wavenumber).
struct CutoffModeError : Error {
    using Error::Error;
};

/// Mode index refers to an evanescent mode (outside the propagating set).
struct EvanescentModeError : Error {
    using Error::Error;
};

/// Sampling grid too coarse for the requested correlation lengths.
struct ResolutionError : Error {
    using Error::Error;
};

/// Requested correlation model has no closed-form treatment.
struct UnsupportedModelError : Error {
    using Error::Error;
};

/// Integration step violates the stability limit.
struct StabilityError : Error {
    using Error::Error;
};

/// Propagator integration finished outside its accuracy contract.
struct IntegrationFailure : Error {
    using Error::Error;
};

/// Coupling graph is reducible; mode powers never equalize.
struct NoEquipartitionError : Error {
    using Error::Error;
};

/// Scenario violates an asymptotic-regime precondition.
struct RegimeViolationError : Error {
    using Error::Error;
};

/// Run configuration failed schema validation.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace wgmig
