#pragma once

#include <stdexcept>
#include <string>

namespace av2 {

// Base class for all domain errors thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Evaluation requested at the essential singularity (z = infinity).
struct EssentialSingularity : Error {
    using Error::Error;
};

// A preimage of an omitted value (an asymptotic value) was requested.
struct OmittedValue : Error {
    using Error::Error;
};

// A second asymptotic value of 0 or 1 is incompatible with the normalization.
struct InvalidAsymptoticValue : Error {
    using Error::Error;
};

// A numeric probe sits too close to a pole for the requested operation.
struct PoleProximity : Error {
    using Error::Error;
};

// A parameter left its admissible range (alpha = 0, beta = 0, ...).
struct DegenerateParameter : Error {
    using Error::Error;
};

// Marked points fail a consistency relation they are supposed to satisfy.
struct InconsistentConfiguration : Error {
    using Error::Error;
};

// Self-refining quadrature failed to settle within its depth limit.
struct QuadratureFailure : Error {
    using Error::Error;
};

// Structured input (portrait, configuration, JSON file) failed validation.
struct InvalidInput : Error {
    using Error::Error;
};

}  // namespace av2
