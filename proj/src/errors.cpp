#include "claimdiff/errors.hpp"

namespace claimdiff {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingSlot: return "MissingSlot";
    case ErrorCode::UnknownSlot: return "UnknownSlot";
    case ErrorCode::MissingWinner: return "MissingWinner";
    case ErrorCode::MalformedDifferenceBlock: return "MalformedDifferenceBlock";
    case ErrorCode::InvalidJudgment: return "InvalidJudgment";
    case ErrorCode::InvalidSeverity: return "InvalidSeverity";
    case ErrorCode::NonContiguousIndices: return "NonContiguousIndices";
    case ErrorCode::MissingScore: return "MissingScore";
    case ErrorCode::ScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::MissingRationale: return "MissingRationale";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::NonFiniteReward: return "NonFiniteReward";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::UnknownEnumToken: return "UnknownEnumToken";
    case ErrorCode::IllegalPair: return "IllegalPair";
    case ErrorCode::EmptyBenchmark: return "EmptyBenchmark";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ZeroWords: return "ZeroWords";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFew: return "TooFew";
    case ErrorCode::ConstantInput: return "ConstantInput";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::Transport: return "Transport";
    case ErrorCode::MalformedAfterRetries: return "MalformedAfterRetries";
    case ErrorCode::MissingImage: return "MissingImage";
    case ErrorCode::AuthMissing: return "AuthMissing";
    case ErrorCode::UnreadableImage: return "UnreadableImage";
    case ErrorCode::InputMalformed: return "InputMalformed";
    case ErrorCode::BackendFailure: return "BackendFailure";
    case ErrorCode::UnpairedSample: return "UnpairedSample";
    case ErrorCode::DivergedParams: return "DivergedParams";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "UnknownError";
}

}  // namespace claimdiff
