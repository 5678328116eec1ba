#pragma once

#include <stdexcept>
#include <string>

namespace adagrid {

/// Malformed dataset or manifest files (bad line structure, bad values).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs that leave an operation with no meaningful work to do
/// (empty edge sets, empty score lists, splits that round to zero).
class DegenerateInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Edge message ratio outside (0, 1).
class InvalidRatioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Negative sampling ran out of candidate non-edges of the required kind.
class ExhaustionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inconsistent search or experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values encountered during training.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Matrix dimension mismatch.
class ShapeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace adagrid
