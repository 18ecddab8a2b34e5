#include "ltg/error.hpp"

namespace ltg {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedEmbeddingFile: return "MalformedEmbeddingFile";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::EmptyVocabularyOverlap: return "EmptyVocabularyOverlap";
    case ErrorCode::TextTooShort: return "TextTooShort";
    case ErrorCode::InsufficientPositiveLags: return "InsufficientPositiveLags";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::WrongPhase: return "WrongPhase";
    case ErrorCode::UnknownPrompt: return "UnknownPrompt";
    case ErrorCode::PromptPrefixMismatch: return "PromptPrefixMismatch";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::TooLong: return "TooLong";
    case ErrorCode::NoWorkAvailable: return "NoWorkAvailable";
    case ErrorCode::ScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::DuplicateRating: return "DuplicateRating";
    case ErrorCode::UnknownAssignment: return "UnknownAssignment";
    case ErrorCode::UnknownSubmission: return "UnknownSubmission";
    case ErrorCode::NoRatings: return "NoRatings";
    case ErrorCode::InvalidPhaseTransition: return "InvalidPhaseTransition";
    case ErrorCode::Unauthorized: return "Unauthorized";
    case ErrorCode::BadRequest: return "BadRequest";
  }
  return "Unknown";
}

bool Error::is_metric_error() const noexcept {
  switch (code_) {
    case ErrorCode::EmptyVocabularyOverlap:
    case ErrorCode::TextTooShort:
    case ErrorCode::InsufficientPositiveLags:
    case ErrorCode::DegenerateFit:
    case ErrorCode::ZeroDenominator:
      return true;
    default:
      return false;
  }
}

}  // namespace ltg
