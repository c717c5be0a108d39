#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace claimdiff {

/// Which side the image supports on one difference.
enum class Judgment { A, B, BothWrong, BothSupported };

enum class Winner { A, B, Tie };

/// Severity of a side-specific error. NA pairs with error type NONE.
enum class Severity { S1, S2, S3, NA };

std::string_view judgment_token(Judgment j);        // "A", "B", "both_wrong", ...
std::string_view winner_token(Winner w);            // "A", "B", "Tie"
std::string_view severity_token(Severity s);        // "1", "2", "3", "NA"

/// One side's error on a difference. `type` is an open-vocabulary token,
/// normalized to be non-empty and whitespace-free; "NONE" means no error.
struct SideError {
  std::string type = "NONE";
  std::string detail;
  Severity severity = Severity::NA;

  bool is_none() const { return type == "NONE"; }
};

/// One judge-discovered actor-reference difference with side-specific errors.
struct DifferenceRecord {
  int index = 0;  // 1-based, contiguous within a transcript
  std::string aspect;
  std::string claim_a;
  std::string claim_b;
  Judgment judgment = Judgment::BothSupported;
  SideError error_a;
  SideError error_b;
  /// Set when the judgment label contradicts the error fields (e.g.
  /// judgment=A but error_a.type != NONE). The record still parses; reward
  /// composition counts the error fields and logs the warning.
  bool consistency_warning = false;
};

struct ClaimDiffTranscript {
  std::vector<DifferenceRecord> differences;
  Winner overall_winner = Winner::Tie;
  std::string raw;  // original text when parsed; empty for built transcripts
};

struct HolisticVerdict {
  int score = 0;  // 0..10
  std::string rationale;
};

/// Parses the strict claim-difference response format. Total over text:
/// every failure is a structured Error with one of
///   MissingWinner, MalformedDifferenceBlock, InvalidJudgment,
///   InvalidSeverity, NonContiguousIndices.
/// Header names match case-insensitively with whitespace tolerated around
/// colons; field bodies are preserved verbatim after one leading space is
/// trimmed. Stray prose or markdown fences before the first recognized
/// header are skipped; text after the winner value is ignored.
ClaimDiffTranscript parse_claimdiff(std::string_view text);

/// Canonical serializer; parse_claimdiff(serialize_claimdiff(t)) reproduces
/// t field-for-field.
std::string serialize_claimdiff(const ClaimDiffTranscript& transcript);

/// Parses "SCORE: <0..10>" / "RATIONALE: <one line>" responses.
/// Errors: MissingScore, ScoreOutOfRange, MissingRationale.
HolisticVerdict parse_holistic(std::string_view text);

}  // namespace claimdiff
