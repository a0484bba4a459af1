#include "wsunsal/errors.hpp"

namespace wsun {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::unknown: return "Unknown";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::invalid_config: return "InvalidConfig";
    case ErrorCode::io_error: return "IoError";
    case ErrorCode::not_positive_definite: return "NotPositiveDefinite";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::size_mismatch: return "SizeMismatch";
    case ErrorCode::non_finite_value: return "NonFiniteValue";
    case ErrorCode::negative_label: return "NegativeLabel";
    case ErrorCode::non_contiguous_classes: return "NonContiguousClasses";
    case ErrorCode::band_out_of_range: return "BandOutOfRange";
    case ErrorCode::empty_class: return "EmptyClass";
    case ErrorCode::empty_dictionary: return "EmptyDictionary";
    case ErrorCode::even_window: return "EvenWindow";
    case ErrorCode::negative_threshold: return "NegativeThreshold";
    case ErrorCode::non_finite_iterate: return "NonFiniteIterate";
    case ErrorCode::empty_class_range: return "EmptyClassRange";
    case ErrorCode::zero_norm: return "ZeroNorm";
    case ErrorCode::unlabeled_test_pixel: return "UnlabeledTestPixel";
    case ErrorCode::empty_matrix: return "EmptyMatrix";
    case ErrorCode::inconsistent_class_count: return "InconsistentClassCount";
  }
  return "Unknown";
}

}  // namespace wsun
