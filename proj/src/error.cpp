#include "kpeval/error.hpp"

namespace kpeval {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyPhrase: return "EmptyPhrase";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kMissingDoc: return "MissingDoc";
    case ErrorCode::kMissingEmbedding: return "MissingEmbedding";
    case ErrorCode::kProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::kProviderProtocol: return "ProviderProtocol";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kZeroNorm: return "ZeroNorm";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kEmptyReferences: return "EmptyReferences";
    case ErrorCode::kEmptyPredictions: return "EmptyPredictions";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kEmptyQuery: return "EmptyQuery";
    case ErrorCode::kDegenerateMass: return "DegenerateMass";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kAllTied: return "AllTied";
    case ErrorCode::kTooFewValid: return "TooFewValid";
    case ErrorCode::kTooFewPhrases: return "TooFewPhrases";
    case ErrorCode::kUnmatchedIds: return "UnmatchedIds";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace kpeval
