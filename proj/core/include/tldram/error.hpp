#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tldram {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite, non-positive or otherwise out-of-range model parameters.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A voltage threshold was not reached within the solver horizon.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  CalibrationError(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}

  // Relative t_rc error per anchor at the best point found.
  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

// A command was issued that the bank state machine does not allow. This is a
// simulator bug, never a property of the workload.
class ProtocolViolation : public Error {
 public:
  using Error::Error;
};

class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

class RequestError : public Error {
 public:
  using Error::Error;
};

class TraceParseError : public Error {
 public:
  TraceParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ComparisonError : public Error {
 public:
  using Error::Error;
};

class EmptyRunError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}

  // JSON-pointer-like location of the offending field, e.g. "/device/t_ck_ns".
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace tldram
