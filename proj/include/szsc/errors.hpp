#pragma once

#include <stdexcept>

namespace szsc {

// Caller-side misuse: shape mismatches, out-of-range parameters, malformed files.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A solver could not produce a finite, verifiable result.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem-level failures (unreadable path, failed rename, ...).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace szsc
