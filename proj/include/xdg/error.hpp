#pragma once

#include <stdexcept>
#include <string>

namespace xdg {

enum class ErrorKind {
  InvalidDomain,
  InvalidMap,
  InvalidConfig,
  InvalidInput,
  DegenerateLevelSet,
  MissingSpecies,
  MissingInterface,
  InsufficientAgglomeration,
  IsolatedSmallCell,
  DegenerateAggregate,
  DimensionMismatch,
  SingularSystem,
  Io,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` distinguishes the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDomain: return "invalid-domain";
    case ErrorKind::InvalidMap: return "invalid-map";
    case ErrorKind::InvalidConfig: return "invalid-config";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::DegenerateLevelSet: return "degenerate-levelset";
    case ErrorKind::MissingSpecies: return "missing-species";
    case ErrorKind::MissingInterface: return "missing-interface";
    case ErrorKind::InsufficientAgglomeration: return "insufficient-agglomeration";
    case ErrorKind::IsolatedSmallCell: return "isolated-small-cell";
    case ErrorKind::DegenerateAggregate: return "degenerate-aggregate";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::SingularSystem: return "singular-system";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace xdg
