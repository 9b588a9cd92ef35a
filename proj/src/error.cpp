#include "swibal/error.hpp"

namespace swibal {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotHurwitz: return "NotHurwitz";
    case ErrorCode::NearSingular: return "NearSingular";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::SingularKroneckerMatrix: return "SingularKroneckerMatrix";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::OrderTooLarge: return "OrderTooLarge";
    case ErrorCode::DegenerateGramians: return "DegenerateGramians";
    case ErrorCode::BiorthogonalityViolated: return "BiorthogonalityViolated";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace swibal
