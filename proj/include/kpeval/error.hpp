#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kpeval {

enum class ErrorCode {
  kEmptyPhrase,
  kParseError,
  kDuplicateId,
  kMissingDoc,
  kMissingEmbedding,
  kProviderUnavailable,
  kProviderProtocol,
  kDimMismatch,
  kZeroNorm,
  kNonFinite,
  kEmptySet,
  kEmptyReferences,
  kEmptyPredictions,
  kEmptyCorpus,
  kEmptyQuery,
  kDegenerateMass,
  kLengthMismatch,
  kZeroVariance,
  kAllTied,
  kTooFewValid,
  kTooFewPhrases,
  kUnmatchedIds,
  kInvalidArgument,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the toolkit carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // what() without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace kpeval
