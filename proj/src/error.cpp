#include "hoalign/error.hpp"

namespace hoalign {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kEmptyMesh: return "EmptyMesh";
    case ErrorKind::kDegenerateCloud: return "DegenerateCloud";
    case ErrorKind::kZeroArea: return "ZeroArea";
    case ErrorKind::kEmptyCloud: return "EmptyCloud";
    case ErrorKind::kSizeMismatch: return "SizeMismatch";
    case ErrorKind::kDegenerateGeometry: return "DegenerateGeometry";
    case ErrorKind::kEmptyList: return "EmptyList";
    case ErrorKind::kInsufficientSamples: return "InsufficientSamples";
    case ErrorKind::kEmptyOverlap: return "EmptyOverlap";
    case ErrorKind::kEmptyTable: return "EmptyTable";
    case ErrorKind::kTooLarge: return "TooLarge";
    case ErrorKind::kConfigError: return "ConfigError";
    case ErrorKind::kParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace hoalign
