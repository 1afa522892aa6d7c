#pragma once

#include <stdexcept>
#include <string>

namespace chns {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Iterative solver exhausted max_iter without meeting the residual contract.
class NonConvergence : public Error {
public:
    NonConvergence(int iterations, double residual, const std::string& what_op)
        : Error(what_op + ": no convergence after " + std::to_string(iterations) +
                " iterations, residual " + std::to_string(residual)),
          iterations(iterations), residual(residual) {}
    int iterations;
    double residual;
};

/// Singular (a = 0) Helmholtz solve with a right-hand side outside the range
/// of the operator: the mean exceeds the compatibility tolerance.
class IncompatibleRhs : public Error {
public:
    IncompatibleRhs(double mean, double bound)
        : Error("incompatible rhs for singular Helmholtz solve: |mean| = " +
                std::to_string(mean) + " exceeds " + std::to_string(bound)),
          mean(mean), bound(bound) {}
    double mean;
    double bound;
};

/// A field norm exceeded the blow-up ceiling (or went non-finite) mid-step.
class BlowUp : public Error {
public:
    BlowUp(double t, const std::string& field, double value)
        : Error("blow-up at t = " + std::to_string(t) + ": " + field +
                " reached " + std::to_string(value)),
          t(t), field(field), value(value) {}
    double t;
    std::string field;
    double value;
};

/// The fixed time step violates the advective CFL rule. Hard error, no
/// auto-adaptation.
class CflViolation : public Error {
public:
    CflViolation(double dt, double bound)
        : Error("dt = " + std::to_string(dt) + " violates the CFL bound " +
                std::to_string(bound)),
          dt(dt), bound(bound) {}
    double dt;
    double bound;
};

/// Malformed config text (missing '=', empty key, ...). Carries the 1-based line.
class ParseError : public Error {
public:
    ParseError(int line, const std::string& msg)
        : Error("parse error at line " + std::to_string(line) + ": " + msg),
          line(line) {}
    int line;
};

/// A syntactically valid config entry with an invalid or unknown key/value.
class ValidationError : public Error {
public:
    ValidationError(const std::string& key, const std::string& msg)
        : Error("invalid config: " + key + ": " + msg), key(key) {}
    std::string key;
};

/// Filesystem-level failure (open/read/write).
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error("io error: " + msg) {}
};

/// Snapshot payload/sidecar mismatch or corruption.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& msg) : Error("format error: " + msg) {}
};

/// Invalid verification-study setup (e.g. non-divergence-free manufactured v).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error("study config error: " + msg) {}
};

} // namespace chns
