#pragma once

#include <stdexcept>
#include <string>

namespace topodist {

// Machine-readable failure codes. The first block covers malformed inputs
// (CLI exit 2), the second violated operation preconditions (exit 3), the
// last capacity limits (exit 4).
enum class ErrorCode {
  io_failure,
  bad_magic,
  unsupported_version,
  truncated_file,
  malformed_csv,
  non_finite_value,
  dimension_overflow,
  schema_violation,

  invalid_argument,
  degenerate_input,
  insufficient_samples,
  sample_count_mismatch,
  dimension_mismatch,
  asymmetric_matrix,
  not_positive_semidefinite,
  invalid_probability_rows,
  mixed_dimension_diagram,

  capacity_exceeded,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Process exit code used by the CLI layer.
  int exit_code() const noexcept {
    switch (code_) {
      case ErrorCode::io_failure:
      case ErrorCode::bad_magic:
      case ErrorCode::unsupported_version:
      case ErrorCode::truncated_file:
      case ErrorCode::malformed_csv:
      case ErrorCode::non_finite_value:
      case ErrorCode::dimension_overflow:
      case ErrorCode::schema_violation:
        return 2;
      case ErrorCode::capacity_exceeded:
        return 4;
      default:
        return 3;
    }
  }

 private:
  ErrorCode code_;
};

}  // namespace topodist
