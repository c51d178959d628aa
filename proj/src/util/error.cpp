#include "recoding/error.hpp"

namespace recoding {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kVocabularyEmpty: return "VocabularyEmpty";
    case ErrorCode::kVocabularyInvalid: return "VocabularyInvalid";
    case ErrorCode::kEncodingError: return "EncodingError";
    case ErrorCode::kInvalidNoun: return "InvalidNoun";
    case ErrorCode::kInvalidRequest: return "InvalidRequest";
    case ErrorCode::kRetryableTransport: return "RetryableTransport";
    case ErrorCode::kPermanentProviderError: return "PermanentProviderError";
    case ErrorCode::kProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::kJudgeParseError: return "JudgeParseError";
    case ErrorCode::kStalledGeneration: return "StalledGeneration";
    case ErrorCode::kHistoryOverflow: return "HistoryOverflow";
    case ErrorCode::kEmptyExtraction: return "EmptyExtraction";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace recoding
