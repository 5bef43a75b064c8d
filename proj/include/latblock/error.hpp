#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace latblock {

enum class ErrorKind {
  invalid_argument,
  parse,
  dimension_mismatch,
  empty_window,
  empty_subsample_set,
  non_convergent,
  quadrature_budget_exceeded,
  unsupported_shape,
  unsupported_d1_nonlinear,
  degenerate_subsampling,
  missing_sites,
  domain,
  zero_bias_constant,
  insufficient_candidates,
  not_positive_definite,
  window_too_large,
  io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

  /// Validation failures (bad user input) as opposed to runtime failures.
  bool is_validation() const noexcept;

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorKind::invalid_argument, message);
}

}  // namespace latblock
