#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace causal {

enum class ErrorKind {
  InvalidInput,
  ZeroStack,
  EmptyVector,
  NumericOverflow,
  ShapeMismatch,
  EmptyBatch,
  NonFiniteGradient,
  DegenerateTarget,
  DivergedLoss,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library. `index()` carries the iteration,
/// epoch or seed that triggered the error when one applies, otherwise -1.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::int64_t index = -1)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        index_(index) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::int64_t index() const noexcept { return index_; }

 private:
  ErrorKind kind_;
  std::int64_t index_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::ZeroStack: return "ZeroStack";
    case ErrorKind::EmptyVector: return "EmptyVector";
    case ErrorKind::NumericOverflow: return "NumericOverflow";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::EmptyBatch: return "EmptyBatch";
    case ErrorKind::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorKind::DegenerateTarget: return "DegenerateTarget";
    case ErrorKind::DivergedLoss: return "DivergedLoss";
  }
  return "Unknown";
}

}  // namespace causal
