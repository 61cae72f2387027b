#pragma once

#include <stdexcept>
#include <string>

namespace rlmpc {

/// Bad runtime value fed to an operation (non-finite state, mismatched sizes).
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Bad configuration value (non-positive sampling time, empty horizon, ...).
struct InvalidConfig : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Operation requires a non-empty replay buffer.
struct EmptyBuffer : std::logic_error {
  using std::logic_error::logic_error;
};

/// Sequence optimizer could not proceed (non-finite objective).
struct OptimizerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File could not be read or written.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rlmpc
