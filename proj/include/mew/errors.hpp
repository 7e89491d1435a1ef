#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mew {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Jet kernel
// ---------------------------------------------------------------------------

class DegenerateDivision : public Error {
 public:
  explicit DegenerateDivision(std::array<double, 2> base, std::string what = {});
  std::array<double, 2> base;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Raised when a derivative deeper than the jet truncation order is requested.
/// The remedy is to raise the global jet order.
class OrderExceeded : public Error {
 public:
  OrderExceeded(int requested, int available);
  int requested;
  int available;
};

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

class ExprError : public Error {
 public:
  ExprError(const std::string& msg, std::size_t offset);
  std::size_t offset;
  /// The message without the offset suffix.
  std::string detail;
};

class SyntaxError : public ExprError {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected, std::string found);
  std::vector<std::string> expected;
  std::string found;
};

class UnknownIdentifier : public ExprError {
 public:
  UnknownIdentifier(std::size_t offset, std::string name);
  std::string name;
};

/// A DomainError or DegenerateDivision raised while evaluating an expression,
/// tagged with the byte offset of the node that failed.
class EvaluationError : public ExprError {
 public:
  using ExprError::ExprError;
};

// ---------------------------------------------------------------------------
// Invariants / analysis
// ---------------------------------------------------------------------------

class FlatPoint : public Error {
 public:
  using Error::Error;
};

class SigmaZero : public Error {
 public:
  using Error::Error;
};

class DivisionByRho : public Error {
 public:
  using Error::Error;
};

class P0Vanishes : public Error {
 public:
  using Error::Error;
};

class ZeroPolynomial : public Error {
 public:
  using Error::Error;
};

class GridTrackingFailed : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mew
