#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace merit {

enum class ErrorCode {
  // corpus
  MalformedLine,
  EmptyId,
  DuplicateId,
  InvalidLanguage,
  // features / scoring
  EmptyText,
  InvalidWeights,
  InvalidConfig,
  ScorerUnavailable,
  NonFinite,
  EmptyCorpus,
  InsufficientValidPairs,
  // splitting
  InfeasibleSpec,
  // reward
  InvalidPattern,
  InvalidExpertScore,
  GroupTooSmall,
  // metrics
  EmptyInput,
  OutOfRange,
  LengthMismatch,
  DegenerateInput,
  // training prep
  TargetLanguageAsSource,
  EmptySource,
  UnregisteredLanguage,
  IndexOutOfRange,
  InvalidEpsilon,
  InvalidDistribution,
  PositiveLogProb,
  // io / pipeline
  Io,
  MissingArtifact,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace merit
