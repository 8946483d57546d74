#include "crackpath/error.hpp"

namespace crackpath {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NoInclusions: return "NoInclusions";
    case ErrorCode::InvalidResolution: return "InvalidResolution";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyCollection: return "EmptyCollection";
    case ErrorCode::ZeroNormalizer: return "ZeroNormalizer";
    case ErrorCode::MissingPair: return "MissingPair";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace crackpath
