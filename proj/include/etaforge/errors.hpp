#pragma once

#include <stdexcept>
#include <string>

namespace etaforge {

// Numerical failure conditions surfaced by the library.  Every error type
// names the contract it violates; callers that can recover (e.g. by
// refining a grid or widening a fit window) catch the specific type.

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotHermitian : NumericalError {
    using NumericalError::NumericalError;
};
struct NoConvergence : NumericalError {
    using NumericalError::NumericalError;
};
struct IllConditioned : NumericalError {
    using NumericalError::NumericalError;
};
struct GridTooNarrow : NumericalError {
    using NumericalError::NumericalError;
};
struct EnvelopeViolation : NumericalError {
    using NumericalError::NumericalError;
};
struct PhaseJump : NumericalError {
    using NumericalError::NumericalError;
};
struct Singular : NumericalError {
    using NumericalError::NumericalError;
};
struct NonIntegral : NumericalError {
    using NumericalError::NumericalError;
};
struct DegenerateOrder : NumericalError {
    using NumericalError::NumericalError;
};
struct SingularOnCircle : NumericalError {
    using NumericalError::NumericalError;
};
struct GridMismatch : NumericalError {
    using NumericalError::NumericalError;
};
struct TruncationDominated : NumericalError {
    using NumericalError::NumericalError;
};
struct PathDependent : NumericalError {
    using NumericalError::NumericalError;
};
struct SingularSpectrum : NumericalError {
    using NumericalError::NumericalError;
};
struct TailDivergence : NumericalError {
    using NumericalError::NumericalError;
};
struct ThresholdViolated : NumericalError {
    using NumericalError::NumericalError;
};
struct NoPerturbationFound : NumericalError {
    using NumericalError::NumericalError;
};
struct CocycleViolation : NumericalError {
    using NumericalError::NumericalError;
};
struct EigenvalueOnThreshold : NumericalError {
    using NumericalError::NumericalError;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace etaforge
