#pragma once

#include <stdexcept>
#include <string>

namespace gmc {

enum class ErrorKind {
  SyntaxError,
  DuplicateName,
  UnknownProperty,
  UndefinedSymbol,
  UnsupportedOperator,
  DimensionMismatch,
  ChainTooShort,
  ChainTooLong,
  NonSquareInverse,
  IndexOutOfRange,
  InvalidKernelSpec,
  DuplicateKernelName,
  NonPositiveDimension,
  MissingEntry,
  MissingTemplate,
  Unsolvable,
  UnsolvableRange,
  SingularSystem,
  ShapeMismatch,
  InvalidIr,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
  case ErrorKind::SyntaxError: return "SyntaxError";
  case ErrorKind::DuplicateName: return "DuplicateName";
  case ErrorKind::UnknownProperty: return "UnknownProperty";
  case ErrorKind::UndefinedSymbol: return "UndefinedSymbol";
  case ErrorKind::UnsupportedOperator: return "UnsupportedOperator";
  case ErrorKind::DimensionMismatch: return "DimensionMismatch";
  case ErrorKind::ChainTooShort: return "ChainTooShort";
  case ErrorKind::ChainTooLong: return "ChainTooLong";
  case ErrorKind::NonSquareInverse: return "NonSquareInverse";
  case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
  case ErrorKind::InvalidKernelSpec: return "InvalidKernelSpec";
  case ErrorKind::DuplicateKernelName: return "DuplicateKernelName";
  case ErrorKind::NonPositiveDimension: return "NonPositiveDimension";
  case ErrorKind::MissingEntry: return "MissingEntry";
  case ErrorKind::MissingTemplate: return "MissingTemplate";
  case ErrorKind::Unsolvable: return "Unsolvable";
  case ErrorKind::UnsolvableRange: return "UnsolvableRange";
  case ErrorKind::SingularSystem: return "SingularSystem";
  case ErrorKind::ShapeMismatch: return "ShapeMismatch";
  case ErrorKind::InvalidIr: return "InvalidIr";
  }
  return "UnknownError";
}

/// Library-wide error type. `kind` identifies the failure class so callers
/// can branch without string matching; `position` carries a factor index or
/// source location where that is meaningful (otherwise -1).
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string message, long position = -1)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind), position_(position) {}

  ErrorKind kind() const { return kind_; }
  long position() const { return position_; }

private:
  ErrorKind kind_;
  long position_;
};

} // namespace gmc
