#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace swibal {

enum class ErrorCode {
  InvalidArgument,
  ShapeMismatch,
  NotHurwitz,
  NearSingular,
  DimensionTooLarge,
  SingularKroneckerMatrix,
  Diverged,
  NotConverged,
  OrderTooLarge,
  DegenerateGramians,
  BiorthogonalityViolated,
  NotPositiveDefinite,
  NonFiniteState,
  Io,
};

std::string_view error_name(ErrorCode code);

/// Numerical errors carry a code so the CLI can map them to exit status 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const { return error_name(code_); }

  /// True for failures of the numerics (as opposed to bad input).
  bool numerical() const noexcept {
    return code_ != ErrorCode::InvalidArgument && code_ != ErrorCode::Io &&
           code_ != ErrorCode::ShapeMismatch;
  }

 private:
  ErrorCode code_;
};

}  // namespace swibal
