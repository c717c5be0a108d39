#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "claimdiff/advantage.hpp"
#include "claimdiff/ambiguity.hpp"
#include "claimdiff/metrics.hpp"
#include "claimdiff/protocol.hpp"
#include "claimdiff/reward.hpp"

namespace claimdiff::sim {

/// One ground-truth visual fact of a synthetic image.
struct Fact {
  std::string aspect_id;
  std::string true_value;
  double salience = 1.0;  // in (0, 1]
};

struct SyntheticImage {
  std::vector<Fact> facts;
  std::uint64_t seed = 0;
  /// Per-aspect value vocabulary ("v0".."v{n-1}"); corruption picks a
  /// different value uniformly.
  int value_vocab = 5;
};

struct Claim {
  std::string aspect_id;
  std::string value;
  bool hedged = false;
};

/// At most one claim per aspect.
struct SyntheticCaption {
  std::vector<Claim> claims;
};

/// Three shared logits; probabilities via the logistic transform.
struct PolicyParams {
  double emit_logit = 1.0;   // coverage propensity
  double err_logit = -0.6;   // corruption propensity
  double hedge_logit = -1.2; // hedging propensity
};

enum class SimRewardMode { Relative, ActorOnly, Holistic };

std::string_view sim_reward_mode_name(SimRewardMode mode);
SimRewardMode parse_sim_reward_mode(std::string_view name);

struct SimConfig {
  int group_size = 8;   // K rollouts per image
  int steps = 250;
  double learning_rate = 0.2;
  SimRewardMode reward_mode = SimRewardMode::Relative;
  // Scripted holistic judge coefficients (asymmetric on purpose: wrong
  // claims cost far more than omissions).
  double hall_penalty = 2.0;
  double miss_penalty = 0.2;
  // Fixed strong reference policy.
  double ref_emit_prob = 0.9;
  double ref_corrupt_rate = 0.05;
  std::uint64_t seed = 0;
  int n_images = 8;
  int facts_per_image = 12;
  int value_vocab = 5;
  double salient_threshold = 0.5;
  PolicyParams init{};
  SeverityWeights weights{};
  double neutral = 0.5;
  AdvantageMode advantage_mode = AdvantageMode::MeanBaseline;
  /// Ambiguity penalty on the rendered actor caption (claim-diff modes).
  bool ambiguity_enabled = true;

  void validate() const;  // Error(InvalidConfig)
};

struct SimResult {
  std::vector<TrajectoryPoint> trajectory;
  PolicyParams final_params;
};

SyntheticImage make_image(int n_facts, int value_vocab, std::uint64_t seed);

/// Emits each fact with probability sigmoid(emit_logit) * salience;
/// corrupts emitted claims with probability sigmoid(err_logit); hedges with
/// probability sigmoid(hedge_logit). Draw order per fact: emit, then (when
/// emitted) corrupt, corrupted value pick, hedge.
SyntheticCaption sample_caption(const SyntheticImage& image,
                                const PolicyParams& params,
                                std::mt19937_64& rng);

/// Deterministic caption text; hedged claims carry "possibly".
std::string render_caption(const SyntheticCaption& caption);

/// Oracle judge: one DifferenceRecord per aspect where the captions differ
/// (one-sided mentions included). Wrong values get value_hallucination
/// severity 3; omissions of salient facts get detail_omission severity 2 on
/// the omitting side; hedged-but-correct claims get ambiguous_claim
/// severity 1.
ClaimDiffTranscript scripted_claimdiff_judge(const SyntheticImage& image,
                                             const SyntheticCaption& caption_a,
                                             const SyntheticCaption& caption_b,
                                             double salient_threshold = 0.5);

/// Oracle holistic judge:
/// score = round(clamp(10 - hall_penalty*wrong - miss_penalty*missing, 0, 10)).
HolisticVerdict scripted_holistic_judge(const SyntheticImage& image,
                                        const SyntheticCaption& caption,
                                        double hall_penalty,
                                        double miss_penalty,
                                        double salient_threshold = 0.5);

/// GRPO-style loop: sample K captions per image, score through the
/// configured reward path (reward-core composition, ambiguity penalty,
/// neutral handling), normalize advantages within each group, and update the
/// three logits with an advantage-weighted score-function estimate.
/// Error(DivergedParams) when a logit becomes non-finite.
SimResult run_training(const SimConfig& config);

}  // namespace claimdiff::sim
