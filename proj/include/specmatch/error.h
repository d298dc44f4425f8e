#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace specmatch {

enum class ErrorCode {
  FileNotFound,
  UnsupportedFormat,
  CorruptHeader,
  IoFailure,
  InvalidRange,
  InvalidArgument,
  AliasedFrequency,
  InvalidConfig,
  AudioTooShort,
  SegmentTooLong,
  ShapeMismatch,
  IndexOutOfRange,
  ConfigMismatch,
  EmptyCorpus,
  NoEligibleTrack,
  BadMagic,
  UnsupportedVersion,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library-wide exception; `code()` identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace specmatch
