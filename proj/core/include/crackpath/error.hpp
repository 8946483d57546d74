#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crackpath {

enum class ErrorCode {
  BadMagic,
  Truncated,
  EmptyInput,
  NoInclusions,
  InvalidResolution,
  OutOfDomain,
  OutOfRange,
  NonPositiveInput,
  SingularSystem,
  NoConvergence,
  TooFewSamples,
  ShapeMismatch,
  EmptyCollection,
  ZeroNormalizer,
  MissingPair,
  BadConfig,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable error kind. Every failure raised
/// by the library is one of these.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace crackpath
