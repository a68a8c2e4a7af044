#pragma once

#include <stdexcept>
#include <string>

namespace curvgraph {

// Error classes raised by the library. The C API maps each one to a status
// code and the CLI maps status codes onto process exit codes.
enum class ErrorCode {
  invalid_argument,
  row_sum_violation,
  not_irreducible,
  not_reversible,
  unsupported_size,
  non_positive_field,
  negative_density,
  dimension_mismatch,
  non_finite_distance,
  bad_partition,
  truncation_failure,
  degenerate_form,
  lp_infeasible,
  unbounded,
  infeasible_mixture,
  io_error,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace curvgraph
