#pragma once

#include <stdexcept>
#include <string>

namespace trajgan {

// Bad arguments to library calls (empty sets, inverted bounds, ...).
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed input files: missing columns, unparseable cells.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor shape mismatches.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite losses/gradients and other failures inside a training run.
struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid or infeasible configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace trajgan
