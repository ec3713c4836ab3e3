#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rytov {

/// Base class for all toolkit errors. Carries a short machine-readable code
/// that the CLI prints on its single-line error channel.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what_arg)
        : std::runtime_error(what_arg), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// A medium profile was queried where it yields a non-positive density,
/// shear modulus or sound speed, or an operation precondition on physical
/// parameters was violated.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& w) : Error("E_DOMAIN", w) {}
};

/// Momentum lies on (or within the guard band of) the polar axis where the
/// connection's gauge string sits.
class AxisSingularityError : public Error {
public:
    explicit AxisSingularityError(const std::string& w) : Error("E_AXIS_SINGULARITY", w) {}
};

class ZeroMomentumError : public Error {
public:
    explicit ZeroMomentumError(const std::string& w) : Error("E_ZERO_MOMENTUM", w) {}
};

class NotClosedError : public Error {
public:
    explicit NotClosedError(const std::string& w) : Error("E_NOT_CLOSED", w) {}
};

class NotTransverseError : public Error {
public:
    explicit NotTransverseError(const std::string& w) : Error("E_NOT_TRANSVERSE", w) {}
};

/// Two consecutive momentum direction samples are antipodal; the connecting
/// geodesic (and hence the triangulation) is undefined.
class AntipodalSegmentError : public Error {
public:
    explicit AntipodalSegmentError(const std::string& w) : Error("E_ANTIPODAL_SEGMENT", w) {}
};

class StillSingularError : public Error {
public:
    explicit StillSingularError(const std::string& w) : Error("E_STILL_SINGULAR", w) {}
};

/// Path sampling too coarse for the estimators' accuracy contract.
class ResolutionError : public Error {
public:
    explicit ResolutionError(const std::string& w) : Error("E_RESOLUTION", w) {}
};

class StepSizeUnderflowError : public Error {
public:
    explicit StepSizeUnderflowError(const std::string& w) : Error("E_STEP_UNDERFLOW", w) {}
};

class DegenerateMomentumError : public Error {
public:
    explicit DegenerateMomentumError(const std::string& w) : Error("E_DEGENERATE_MOMENTUM", w) {}
};

/// A realization inside a Monte Carlo ensemble failed; records the index.
class EnsembleError : public Error {
public:
    EnsembleError(std::uint64_t index, const std::string& w)
        : Error("E_ENSEMBLE", "realization " + std::to_string(index) + ": " + w), index_(index) {}

    std::uint64_t index() const noexcept { return index_; }

private:
    std::uint64_t index_;
};

/// Malformed configuration or data file (syntax level).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& w) : Error("E_PARSE", w) {}
};

/// Structurally valid input with invalid or unknown content.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& w) : Error("E_VALIDATION", w) {}
};

}  // namespace rytov
