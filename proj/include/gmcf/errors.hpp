#pragma once

#include <stdexcept>
#include <string>

namespace gmcf {

// Invalid configuration: bad model set, non-divisible time steps, bad config keys.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violation of the coupling protocol (timestamp drift, malformed packet, ...).
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AddressingError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

// Raised in sequential interleaving mode when no model can make progress.
class DeadlockError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

// A blocking receive exceeded the runtime's configured receive timeout.
class TimeoutError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Interpolation requested before two profiles were received.
class GuardError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace gmcf
