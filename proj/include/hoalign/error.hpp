#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hoalign {

enum class ErrorKind {
  kInvalidArgument,
  kEmptyMesh,
  kDegenerateCloud,
  kZeroArea,
  kEmptyCloud,
  kSizeMismatch,
  kDegenerateGeometry,
  kEmptyList,
  kInsufficientSamples,
  kEmptyOverlap,
  kEmptyTable,
  kTooLarge,
  kConfigError,
  kParseError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

  /// Same error with `context` prepended to the message.
  Error with_context(const std::string& context) const { return Error(kind_, context + ": " + message_); }

  // Config and parse failures are input errors; everything else is numerical.
  bool is_input_error() const noexcept {
    return kind_ == ErrorKind::kConfigError || kind_ == ErrorKind::kParseError;
  }

 private:
  ErrorKind kind_;
  std::string message_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace hoalign
