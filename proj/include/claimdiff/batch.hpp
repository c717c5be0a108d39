#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "claimdiff/ambiguity.hpp"
#include "claimdiff/judge_client.hpp"
#include "claimdiff/reward.hpp"

namespace claimdiff {

/// One input line of a scoring batch.
struct BatchRecord {
  std::string id;
  std::string prompt_id;  // grouping key for advantages; defaults to id
  std::string image_ref;
  std::string actor_caption;
  std::optional<std::string> reference_caption;
};

/// Parses one JSONL input line. Error(InputMalformed).
BatchRecord parse_batch_record(const std::string& line);

struct BatchOptions {
  RewardConfig reward{};
  AmbiguityConfig ambiguity = AmbiguityConfig::defaults();
  /// Apply the multiplicative hedging penalty after reward composition.
  /// Defaults to on for the claim-diff modes and off for holistic scoring.
  std::optional<bool> ambiguity_penalty;
  judge::JudgeBackendSpec backend{};
  int jobs = 1;
  bool dry_run = false;

  bool penalty_enabled() const {
    if (ambiguity_penalty) return *ambiguity_penalty;
    return reward.mode == RewardMode::Relative ||
           reward.mode == RewardMode::ActorOnly;
  }
};

struct BatchOutcome {
  std::vector<std::string> reward_lines;  // one JSON line per input, in order
  std::vector<std::string> amb_lines;     // per-caption ambiguity reports
  int n_failed = 0;
  int backend_requests = 0;
};

/// Scores every record, preserving input order. Failed records carry a
/// status field, never dropped. With dry_run, prompts are rendered but no
/// backend call is made.
BatchOutcome run_batch(const std::vector<BatchRecord>& records,
                       const BatchOptions& options);

/// Reads records from a JSONL stream; a malformed line becomes a failed
/// record (id "line<N>") rather than aborting the batch.
std::vector<BatchRecord> read_batch_records(std::istream& in,
                                            std::vector<std::string>* errors);

/// Groups reward JSONL lines by prompt_id and normalizes each group.
/// Returns advantage JSON lines in input order.
/// Errors: InputMalformed, NonFiniteReward.
std::vector<std::string> advantages_from_reward_lines(
    const std::vector<std::string>& lines, AdvantageMode mode);

}  // namespace claimdiff
