#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ltg {

enum class ErrorCode {
  MalformedEmbeddingFile,
  EmptyTable,
  EmptyVocabularyOverlap,
  TextTooShort,
  InsufficientPositiveLags,
  DegenerateFit,
  ZeroDenominator,
  InvalidArgument,
  Io,
  // challenge service
  WrongPhase,
  UnknownPrompt,
  PromptPrefixMismatch,
  TooShort,
  TooLong,
  NoWorkAvailable,
  ScoreOutOfRange,
  DuplicateRating,
  UnknownAssignment,
  UnknownSubmission,
  NoRatings,
  InvalidPhaseTransition,
  Unauthorized,
  BadRequest,
};

/// Stable identifier used in CLI messages and HTTP error bodies.
std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for failures of the metric itself (as opposed to I/O or usage).
  bool is_metric_error() const noexcept;

 private:
  ErrorCode code_;
};

}  // namespace ltg
