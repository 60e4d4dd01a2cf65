#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace agarch {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite or out-of-domain numeric argument.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// GARCH parameters outside the positivity / stationarity region.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

class NumericOverflow : public Error {
public:
    using Error::Error;
};

/// Malformed or invalid input data (bad CSV rows, non-positive prices).
class DataValidation : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

/// Empirical covariance could not be factorised even after jitter.
class DegenerateSample : public Error {
public:
    using Error::Error;
};

class DegenerateSeries : public Error {
public:
    using Error::Error;
};

class TuningFailure : public Error {
public:
    TuningFailure(const std::string& what, double last_acceptance)
        : Error(what), last_acceptance_(last_acceptance) {}

    [[nodiscard]] double last_acceptance() const noexcept { return last_acceptance_; }

private:
    double last_acceptance_;
};

/// No summation window satisfied the self-consistency condition below the lag cap.
class NoPlateau : public Error {
public:
    NoPlateau(const std::string& what, double tau_lower_bound)
        : Error(what), tau_lower_bound_(tau_lower_bound) {}

    /// tau_int evaluated at the largest available lag.
    [[nodiscard]] double tau_lower_bound() const noexcept { return tau_lower_bound_; }

private:
    double tau_lower_bound_;
};

class ComparisonRefused : public Error {
public:
    using Error::Error;
};

}  // namespace agarch
