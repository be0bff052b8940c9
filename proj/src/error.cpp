#include "meancurve/error.hpp"

namespace meancurve {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kZeroLength: return "ZeroLength";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kDegenerateTangent: return "DegenerateTangent";
    case ErrorCode::kCoincidentInducers: return "CoincidentInducers";
    case ErrorCode::kNoSamples: return "NoSamples";
    case ErrorCode::kNoPrior: return "NoPrior";
    case ErrorCode::kRecursionExhausted: return "RecursionExhausted";
    case ErrorCode::kInsufficientScales: return "InsufficientScales";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kTooFewImages: return "TooFewImages";
    case ErrorCode::kBinUnderflow: return "BinUnderflow";
    case ErrorCode::kSnapshotMismatch: return "SnapshotMismatch";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace meancurve
