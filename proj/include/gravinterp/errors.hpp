#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace gravinterp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input record. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A record that parses but violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent run configuration (bad split, bad h, n not matching basis).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument to a library operation.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A length scale (ell or delta) that is zero or negative.
class DegenerateScaleError : public Error {
 public:
  using Error::Error;
};

/// Local system rejected by the reciprocal-condition gate.
class ConditioningError : public Error {
 public:
  ConditioningError(double rcond, double rcond_min)
      : Error(message(rcond, rcond_min)),
        rcond_(rcond) {}
  double rcond() const noexcept { return rcond_; }

 private:
  static std::string message(double rcond, double rcond_min) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "ill-conditioned local system: rcond=%.3g < %.3g", rcond, rcond_min);
    return buf;
  }
  double rcond_;
};

/// Kernel evaluated outside its domain (Q <= 0 or log argument <= 0).
class KernelDomainError : public Error {
 public:
  using Error::Error;
};

class StatisticsError : public Error {
 public:
  using Error::Error;
};

}  // namespace gravinterp
