#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace recoding {

enum class ErrorCode {
  kVocabularyEmpty,
  kVocabularyInvalid,
  kEncodingError,
  kInvalidNoun,
  kInvalidRequest,
  kRetryableTransport,
  kPermanentProviderError,
  kProviderUnavailable,
  kJudgeParseError,
  kStalledGeneration,
  kHistoryOverflow,
  kEmptyExtraction,
  kConfigError,
  kIoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace recoding
