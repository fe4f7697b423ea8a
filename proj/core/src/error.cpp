#include "merit/error.hpp"

namespace merit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::EmptyId: return "EmptyId";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::InvalidLanguage: return "InvalidLanguage";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ScorerUnavailable: return "ScorerUnavailable";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::InsufficientValidPairs: return "InsufficientValidPairs";
    case ErrorCode::InfeasibleSpec: return "InfeasibleSpec";
    case ErrorCode::InvalidPattern: return "InvalidPattern";
    case ErrorCode::InvalidExpertScore: return "InvalidExpertScore";
    case ErrorCode::GroupTooSmall: return "GroupTooSmall";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::TargetLanguageAsSource: return "TargetLanguageAsSource";
    case ErrorCode::EmptySource: return "EmptySource";
    case ErrorCode::UnregisteredLanguage: return "UnregisteredLanguage";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidEpsilon: return "InvalidEpsilon";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::PositiveLogProb: return "PositiveLogProb";
    case ErrorCode::Io: return "Io";
    case ErrorCode::MissingArtifact: return "MissingArtifact";
  }
  return "Unknown";
}

}  // namespace merit
