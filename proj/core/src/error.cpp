#include "burnsight/error.hpp"

namespace burnsight {

const char* to_string(FormatErrorKind kind) {
  switch (kind) {
    case FormatErrorKind::kBadMagic:
      return "bad magic";
    case FormatErrorKind::kBadVersion:
      return "bad version";
    case FormatErrorKind::kTruncated:
      return "truncated";
    case FormatErrorKind::kLengthMismatch:
      return "length mismatch";
    case FormatErrorKind::kMalformed:
      return "malformed";
    case FormatErrorKind::kUnsupported:
      return "unsupported";
  }
  return "unknown";
}

FormatError::FormatError(FormatErrorKind kind, const std::string& message)
    : Error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

}  // namespace burnsight
