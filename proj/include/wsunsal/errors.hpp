#pragma once

#include <stdexcept>
#include <string>

namespace wsun {

// Error categories shared between the C++ core and the C API status codes.
// Keep in sync with wsun_status in wsunsal.h.
enum class ErrorCode {
  unknown = 1,
  invalid_argument,
  invalid_config,
  io_error,
  not_positive_definite,
  dimension_mismatch,
  size_mismatch,
  non_finite_value,
  negative_label,
  non_contiguous_classes,
  band_out_of_range,
  empty_class,
  empty_dictionary,
  even_window,
  negative_threshold,
  non_finite_iterate,
  empty_class_range,
  zero_norm,
  unlabeled_test_pixel,
  empty_matrix,
  inconsistent_class_count,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code);

}  // namespace wsun
