#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace blowup {

/// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed nonlinearity spec or expression. `position` is a 0-based
/// character offset into the text that was being parsed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// No positivity threshold `a` could be located for an expression.
class ThresholdError : public Error {
 public:
  using Error::Error;
};

/// Evaluation of a parsed expression failed (division by zero, log of a
/// nonpositive value, non-finite result).
class EvaluationError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Quadrature, root finding or integration failed to converge.
class NumericsError : public Error {
 public:
  using Error::Error;
};

/// A root bracket without a sign change.
class BracketError : public NumericsError {
 public:
  using NumericsError::NumericsError;
};

/// The Keller-Osserman integral does not converge, so no large solution
/// exists and expansion operations are refused.
class KellerOssermanError : public Error {
 public:
  using Error::Error;
};

/// Radicand of the fixed-point map became nonpositive: U0 is too small.
class U0TooSmallError : public NumericsError {
 public:
  using NumericsError::NumericsError;
};

/// An iterate left the ball |v/v0 - 1| < 1/4.
class BallViolationError : public NumericsError {
 public:
  using NumericsError::NumericsError;
};

/// Successive iterate differences stopped decreasing.
class ContractionError : public NumericsError {
 public:
  using NumericsError::NumericsError;
};

/// A power-law exponent hit -1 under integration, or 2/(p-1) is an integer.
class ResonanceError : public DomainError {
 public:
  ResonanceError(const std::string& what, int order)
      : DomainError(what), order_(order) {}
  int order() const noexcept { return order_; }

 private:
  int order_;
};

/// Shooting could not bracket the requested blow-up radius.
class CalibrationError : public NumericsError {
 public:
  using NumericsError::NumericsError;
};

}  // namespace blowup
