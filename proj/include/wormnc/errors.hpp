#pragma once

#include <stdexcept>
#include <string>

namespace wormnc {

/// Base class for all errors raised by the toolkit.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A node cannot sustain the demanded long-term rate (residual rate <= 0,
/// or an arrival rate exceeds the service rate).
struct UnstableSystem : Error {
    UnstableSystem(std::string locus_, double residual_, const std::string& msg)
        : Error(msg), locus(std::move(locus_)), residual(residual_) {}
    std::string locus;  // node / context description
    double residual;    // offending residual rate (decimal, informational)
};

/// Malformed or inconsistent configuration input.
struct ConfigError : Error {
    using Error::Error;
};

/// A coordinate or route leaves the mesh.
struct OutOfGrid : ConfigError {
    using ConfigError::ConfigError;
};

/// An observed simulated delay exceeded its analytic bound.
struct SafetyViolation : Error {
    SafetyViolation(int flow_, unsigned long long seed_, const std::string& msg)
        : Error(msg), flow(flow_), seed(seed_) {}
    int flow;
    unsigned long long seed;
};

/// No flit moved for a full detection window while packets remained.
struct DeadlockDetected : Error {
    using Error::Error;
};

/// The random generator could not find a stable configuration in its
/// retry budget.
struct GenerationExhausted : Error {
    using Error::Error;
};

/// Internal consistency failure (e.g. a curve recursion re-entered itself,
/// which validated feed-forward configurations rule out).
struct InternalError : Error {
    using Error::Error;
};

}  // namespace wormnc
