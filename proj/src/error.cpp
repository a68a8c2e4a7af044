#include "curvgraph/error.hpp"

namespace curvgraph {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::row_sum_violation: return "RowSumViolation";
    case ErrorCode::not_irreducible: return "NotIrreducible";
    case ErrorCode::not_reversible: return "NotReversible";
    case ErrorCode::unsupported_size: return "UnsupportedSize";
    case ErrorCode::non_positive_field: return "NonPositiveField";
    case ErrorCode::negative_density: return "NegativeDensity";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::non_finite_distance: return "NonFiniteDistance";
    case ErrorCode::bad_partition: return "BadPartition";
    case ErrorCode::truncation_failure: return "TruncationFailure";
    case ErrorCode::degenerate_form: return "DegenerateForm";
    case ErrorCode::lp_infeasible: return "LPInfeasible";
    case ErrorCode::unbounded: return "Unbounded";
    case ErrorCode::infeasible_mixture: return "InfeasibleMixture";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

}  // namespace curvgraph
