#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace genet {

enum class ErrorCode {
  NonSymmetric,
  NonFinite,
  NonSquare,
  SingularConstraint,
  TooFewSamples,
  SingleClass,
  EmptyClass,
  DimensionTooLarge,
  DimensionMismatch,
  LabelRequired,
  ParseError,
  FormatError,
  IoError,
  ClassTooSmall,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind rather than the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace genet
