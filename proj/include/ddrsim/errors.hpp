#ifndef DDRSIM_ERRORS_HPP
#define DDRSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ddr {

/// Closed-form populations hit the 0/0 regime (|D| below the floor).
struct DegenerateParameters : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Steady-state linear system is rank-deficient beyond the trace replacement.
struct SingularSystem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A cut has no usable peak structure for the requested analysis.
struct NoStructure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Transmission requested against a zero-power input field.
struct ZeroInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Probe amplitude exceeded the configured ceiling (runaway gain).
struct AmplificationOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Power changed faster per step than the stability bound allows with no gain present.
struct StepUnstable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Scenario configuration failed validation; message carries the offending path.
struct ConfigInvalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ddr

#endif
