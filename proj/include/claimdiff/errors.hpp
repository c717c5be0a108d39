#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace claimdiff {

/// Structured error codes shared by the whole toolkit. Every throwing
/// operation documents which subset it can raise.
enum class ErrorCode {
  // prompt rendering
  MissingSlot,
  UnknownSlot,
  // claim-difference transcript parsing
  MissingWinner,
  MalformedDifferenceBlock,
  InvalidJudgment,
  InvalidSeverity,
  NonContiguousIndices,
  // holistic verdict parsing
  MissingScore,
  ScoreOutOfRange,
  MissingRationale,
  // reward composition
  InvalidWeights,
  // advantage normalization
  EmptyGroup,
  NonFiniteReward,
  // diagnostic benchmark
  MalformedJson,
  UnknownEnumToken,
  IllegalPair,
  EmptyBenchmark,
  // metrics
  EmptyInput,
  ZeroWords,
  LengthMismatch,
  TooFew,
  ConstantInput,
  IoFailure,
  // judge client
  Transport,
  MalformedAfterRetries,
  MissingImage,
  AuthMissing,
  UnreadableImage,
  // batch processing
  InputMalformed,
  BackendFailure,
  UnpairedSample,
  // simulator
  DivergedParams,
  // configuration
  InvalidConfig,
};

std::string_view error_code_name(ErrorCode code);

/// Exception carrying a structured code plus a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace claimdiff
