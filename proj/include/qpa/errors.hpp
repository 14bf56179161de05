#pragma once

#include <stdexcept>
#include <string>

namespace qpa {

/// Base of every error raised by the library. `exit_code()` is the CLI
/// status the harness maps it to: 2 for validation, 3 for numerical aborts.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 3; }
};

class ValidationError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

/// Malformed config: unknown key, wrong type, missing required section.
class SchemaError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A physical quantity outside its allowed range (negative resistance, ...).
class UnitError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// D_M <= 0 or a derived effective capacitance <= 0.
class DegenerateCoupling : public Error {
public:
    using Error::Error;
};

/// The scattering matrix is numerically singular at one frequency.
class SingularAtFrequency : public Error {
public:
    SingularAtFrequency(const std::string& what, double condition)
        : Error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

class NonHermitian : public Error {
public:
    using Error::Error;
};

/// Population reached the top retained Fock level.
class TruncationLeakage : public Error {
public:
    TruncationLeakage(const std::string& what, double time, double leakage)
        : Error(what), time_(time), leakage_(leakage) {}
    double time() const noexcept { return time_; }
    double leakage() const noexcept { return leakage_; }

private:
    double time_;
    double leakage_;
};

class UnstableDrift : public Error {
public:
    using Error::Error;
};

/// A covariance matrix violating the uncertainty relation.
class Nonphysical : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace qpa
