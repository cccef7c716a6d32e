#pragma once

#include <stdexcept>
#include <string>

namespace omlevy {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class GridTooCoarse : public Error {
 public:
  using Error::Error;
};

/// A reference path violates the kinematic constraint dphi1/dt = g(phi1, phi2).
class ConstraintViolation : public Error {
 public:
  ConstraintViolation(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Numerical failures: solver divergence, stiff blow-up, singular systems.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public NumericalError {
 public:
  NoConvergence(const std::string& what, int iterations, double mismatch)
      : NumericalError(what), iterations_(iterations), mismatch_(mismatch) {}
  int iterations() const { return iterations_; }
  double mismatch() const { return mismatch_; }

 private:
  int iterations_;
  double mismatch_;
};

class IntegrationFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularSystem : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A simulated trajectory left the representable range.
class BlowUp : public NumericalError {
 public:
  BlowUp(const std::string& what, double t, double x, double y)
      : NumericalError(what), t_(t), x_(x), y_(y) {}
  double time() const { return t_; }
  double last_x() const { return x_; }
  double last_y() const { return y_; }

 private:
  double t_, x_, y_;
};

class BudgetExceeded : public NumericalError {
 public:
  BudgetExceeded(const std::string& what, long long attempts, long long accepted)
      : NumericalError(what), attempts_(attempts), accepted_(accepted) {}
  long long attempts() const { return attempts_; }
  long long accepted() const { return accepted_; }
  double acceptance_rate() const {
    return attempts_ > 0 ? static_cast<double>(accepted_) / static_cast<double>(attempts_) : 0.0;
  }

 private:
  long long attempts_, accepted_;
};

/// Malformed configuration or command-line input. `line` is 0 when not tied to a file line.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace omlevy
