#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wave_esc {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent configuration (sizes, CFL, unknown keys, ...).
/// `line()` is 0 when the problem is not tied to a config file line.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A value violates a domain invariant (non-finite input, resonance, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The explicit solver produced a non-finite or runaway value.
class NumericalBlowup : public Error {
 public:
  NumericalBlowup(const std::string& what, std::uint64_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  std::uint64_t step() const noexcept { return step_; }

 private:
  std::uint64_t step_;
};

/// The backstepping kernel denominator vanishes.
class KernelSingularity : public Error {
 public:
  using Error::Error;
};

/// A controller intermediate became non-finite; the message lists the parts.
class ControllerBlowup : public Error {
 public:
  using Error::Error;
};

}  // namespace wave_esc
