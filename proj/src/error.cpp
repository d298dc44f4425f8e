#include "specmatch/error.h"

namespace specmatch {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptHeader: return "CorruptHeader";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::AliasedFrequency: return "AliasedFrequency";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::AudioTooShort: return "AudioTooShort";
    case ErrorCode::SegmentTooLong: return "SegmentTooLong";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::NoEligibleTrack: return "NoEligibleTrack";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
  }
  return "Unknown";
}

}  // namespace specmatch
