#pragma once

#include <stdexcept>
#include <string>

namespace mtjrng {

// Base for all domain errors thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Magnetization or field became NaN/inf during integration.
struct NonFiniteState : Error {
    explicit NonFiniteState(const std::string& msg) : Error(msg) {}
};

// Reset pulse failed to drive the free layer to the required pole.
struct ResetFailed : Error {
    explicit ResetFailed(const std::string& msg) : Error(msg) {}
};

// Argument outside its documented domain.
struct OutOfRange : Error {
    explicit OutOfRange(const std::string& msg) : Error(msg) {}
};

// Iterative routine exceeded its iteration budget.
struct NonConvergence : Error {
    explicit NonConvergence(const std::string& msg) : Error(msg) {}
};

// Query point outside the truncation interval.
struct OutOfSupport : Error {
    explicit OutOfSupport(const std::string& msg) : Error(msg) {}
};

// Truncation interval carries (numerically) zero probability mass.
struct ZeroMassInterval : Error {
    explicit ZeroMassInterval(const std::string& msg) : Error(msg) {}
};

// Histogram with zero total count where samples are required.
struct EmptyHistogram : Error {
    explicit EmptyHistogram(const std::string& msg) : Error(msg) {}
};

// Archive queried before any entry was recorded.
struct EmptyArchive : Error {
    explicit EmptyArchive(const std::string& msg) : Error(msg) {}
};

// Particle trace too short or constant, posterior undefined.
struct DegenerateTrace : Error {
    explicit DegenerateTrace(const std::string& msg) : Error(msg) {}
};

// Configuration file or value rejected.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

} // namespace mtjrng
