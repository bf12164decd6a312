#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace shakebot {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on numeric inputs was violated (non-positive kappa, bad axis, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Configuration or input-file problem. Maps to CLI exit code 2.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Malformed input file; carries the 1-based offending line.
class FormatError : public ConfigError {
public:
  FormatError(const std::string& what, std::size_t line)
      : ConfigError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// A motion the actuator cannot perform. Maps to CLI exit code 3.
class MotionRejected : public Error {
public:
  enum class Reason { StrokeOverflow, OverSpeed, PulseRateExceeded, Infeasible };

  MotionRejected(Reason reason, const std::string& what, double limit)
      : Error(what), reason_(reason), limit_(limit) {}

  Reason reason() const noexcept { return reason_; }
  /// The limiting value that was exceeded, in the unit of the check.
  double limit() const noexcept { return limit_; }

private:
  Reason reason_;
  double limit_;
};

/// Integration blew up. Maps to CLI exit code 4.
class NumericalFailure : public Error {
public:
  NumericalFailure(const std::string& what, double time)
      : Error(what + " at t=" + std::to_string(time) + " s"), time_(time) {}
  double time() const noexcept { return time_; }

private:
  double time_;
};

/// Execution refused by the safety state machine.
class SafetyInterlock : public Error {
public:
  using Error::Error;
};

/// Driver reported a fault or a switch never triggered.
class HardwareFault : public Error {
public:
  using Error::Error;
};

/// No fiducial marker is visible in both frames.
class OcclusionError : public Error {
public:
  using Error::Error;
};

/// Least-squares data carries no information (zero norm, rank deficiency).
class DegenerateData : public Error {
public:
  using Error::Error;
};

}  // namespace shakebot
