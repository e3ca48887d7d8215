#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uood {

enum class ErrorCode {
  Io,
  BadMagic,
  Truncated,
  ZeroDimension,
  NonFiniteValue,
  BadManifest,
  BadModel,
  TooFewSamples,
  SingularCovariance,
  ZeroVariance,
  DimensionMismatch,
  LayerCountMismatch,
  AllErrorsZero,
  EmptyInput,
  NonFiniteScore,
  EmptyGroup,
  InvalidRange,
  InvalidArgument,
  InsufficientSamples,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace uood
