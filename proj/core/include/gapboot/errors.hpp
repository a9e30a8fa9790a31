#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gapboot {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Element counts or shapes do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Input values are unusable (non-finite, negative counts, ...).
class DataError : public Error {
public:
    using Error::Error;
};

class BoundsError : public Error {
public:
    using Error::Error;
};

/// An estimator failed or produced a malformed result on some slice.
class EvaluationError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

/// A sampling-window correlation has a zero denominator.
class DegenerateCorrelationError : public Error {
public:
    DegenerateCorrelationError(const std::string& what, std::size_t row)
        : Error(what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Normal-equation matrix singular or too ill-conditioned to trust.
class RankError : public Error {
public:
    using Error::Error;
};

/// Quantities that must agree by construction do not (e.g. slot sets that fail to partition).
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Invalid user configuration (bad preset name, unknown method, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace gapboot
