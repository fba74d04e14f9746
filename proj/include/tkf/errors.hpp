#pragma once

#include <stdexcept>
#include <string>

namespace tkf {

// Invalid input or configuration. The CLI maps these to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical breakdown during a run. The CLI maps these to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TopologyError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class NonClosedCycle : public TopologyError {
 public:
  using TopologyError::TopologyError;
};

class DuplicateFace : public TopologyError {
 public:
  using TopologyError::TopologyError;
};

class DanglingIndex : public TopologyError {
 public:
  using TopologyError::TopologyError;
};

class PoolOverflow : public TopologyError {
 public:
  using TopologyError::TopologyError;
};

class ShapeMismatch : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InsufficientStream : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class MissingGroundTruth : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class SingularInnovation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonFiniteGradient : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Wraps a numerical failure raised inside the filter loop with its step index.
class StepFailure : public NumericalError {
 public:
  StepFailure(long step, const std::string& what)
      : NumericalError("step " + std::to_string(step) + ": " + what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

}  // namespace tkf
