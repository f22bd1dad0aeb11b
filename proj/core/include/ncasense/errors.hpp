#pragma once

#include <stdexcept>
#include <string>

namespace nca {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor/layer dimension mismatch; message names expected vs actual dims.
struct ShapeError : Error {
    using Error::Error;
};

// Non-finite value where a finite one is required (readings, losses, grads).
struct NonFiniteError : Error {
    using Error::Error;
};

// Malformed or incompatible file content (datasets, checkpoints, configs).
struct IoError : Error {
    using Error::Error;
};

// Degenerate geometry (zero-area polygon, rank-deficient fit, ...).
struct GeometryError : Error {
    using Error::Error;
};

}  // namespace nca
