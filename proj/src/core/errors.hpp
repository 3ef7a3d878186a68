#pragma once

#include <stdexcept>
#include <string>

namespace msbif {

// Codes double as the C API status values (see include/msbif.h).
enum class ErrorCode {
  invalid_argument = 1,
  unknown_model = 2,
  unknown_variant = 3,
  singular_matrix = 4,
  no_convergence = 5,
  inconsistent_symmetry = 6,
  not_mean_square_stable = 7,
  missing_analytic_jacobian = 8,
  missing_remainder_meta = 9,
  missing_inputs = 10,
  too_few_paths = 11,
  schema_mismatch = 12,
  io_error = 13,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string msg)
      : std::runtime_error(std::move(msg)), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace msbif
