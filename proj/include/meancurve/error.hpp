#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace meancurve {

enum class ErrorCode {
  kZeroLength,
  kEmptyInput,
  kNonFinite,
  kParseError,
  kEmptyCorpus,
  kDegenerateTangent,
  kCoincidentInducers,
  kNoSamples,
  kNoPrior,
  kRecursionExhausted,
  kInsufficientScales,
  kNoConvergence,
  kOutOfRange,
  kTooFewImages,
  kBinUnderflow,
  kSnapshotMismatch,
  kIo,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this exception; the code lets
// callers (the CLI in particular) map failures onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace meancurve
