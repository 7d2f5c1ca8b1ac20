#pragma once

#include <stdexcept>
#include <string>

namespace hypdisp {

struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// quadrature failed to reach its tolerance within the node/panel budget
struct QuadratureError : NumericsError {
    using NumericsError::NumericsError;
};

// incompatible or malformed grids
struct GridError : NumericsError {
    using NumericsError::NumericsError;
};

struct CalibrationError : NumericsError {
    using NumericsError::NumericsError;
};

// invalid parameter combinations (dimension, exponent ranges, mode constraints)
struct DomainError : NumericsError {
    using NumericsError::NumericsError;
};

// fixed-point iteration failed to contract
struct ContractionError : NumericsError {
    using NumericsError::NumericsError;
};

} // namespace hypdisp
