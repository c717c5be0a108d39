#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "claimdiff/protocol.hpp"

namespace claimdiff {

/// Monotone severity weighting: w1 <= w2 <= w3, all non-negative.
struct SeverityWeights {
  double w1 = 1.0;
  double w2 = 1.25;
  double w3 = 1.6;

  double w_max() const;
  double at(Severity s) const;
  void validate() const;  // throws Error(InvalidWeights)
};

/// Per-caption error statistics computed from one transcript.
struct ErrorStats {
  int d = 0;          // number of differences
  int e_a = 0;        // unweighted actor errors
  int e_b = 0;        // unweighted reference errors
  double e_a_w = 0.0; // severity-weighted actor errors
  double e_b_w = 0.0; // severity-weighted reference errors
  double w_max = 0.0; // max severity weight of the configured scheme
  int d_plus = 1;     // max(d, 1)
};

enum class RewardMode { Relative, ActorOnly, HolisticWithRef, HolisticNoRef };

std::string_view reward_mode_name(RewardMode mode);
RewardMode parse_reward_mode(std::string_view name);  // Error(InvalidConfig)

struct RewardConfig {
  SeverityWeights weights{};
  double neutral = 0.5;  // reward for zero-difference transcripts
  RewardMode mode = RewardMode::Relative;
  /// Optional hook mapping error types to severities; consulted only when a
  /// non-NONE error carries severity NA (unreachable through the parser).
  /// Ships empty.
  std::map<std::string, Severity> type_severity;

  void validate() const;  // throws Error(InvalidWeights)
};

/// Counts side-specific errors and severity-weighted sums. Records whose
/// judgment contradicts their error fields are counted by the error fields;
/// a note is appended to `warnings` when provided.
ErrorStats compute_stats(const ClaimDiffTranscript& transcript,
                         const SeverityWeights& weights,
                         std::vector<std::string>* warnings = nullptr,
                         const std::map<std::string, Severity>* type_severity =
                             nullptr);

/// R = 1/2 - 1/2 * clamp((E_A^w - E_B^w) / (W_max * D_+), -1, 1);
/// zero-difference transcripts get config.neutral.
double relative_reward(const ErrorStats& stats, const RewardConfig& config);

/// R = 1 - E_A^w / (W_max * D); zero-difference transcripts get
/// config.neutral.
double actor_only_reward(const ErrorStats& stats, const RewardConfig& config);

/// SCORE / 10.
double holistic_reward(const HolisticVerdict& verdict);

}  // namespace claimdiff
