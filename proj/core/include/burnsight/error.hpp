#pragma once

#include <stdexcept>
#include <string>

namespace burnsight {

// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied argument or precondition was invalid. The CLI maps this
// to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class FormatErrorKind {
  kBadMagic,
  kBadVersion,
  kTruncated,
  kLengthMismatch,
  kMalformed,
  kUnsupported,
};

const char* to_string(FormatErrorKind kind);

// A file was readable but its content does not match the expected format.
class FormatError : public Error {
 public:
  FormatError(FormatErrorKind kind, const std::string& message);

  FormatErrorKind kind() const noexcept { return kind_; }
  // Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  FormatErrorKind kind_;
  std::string detail_;
};

}  // namespace burnsight
