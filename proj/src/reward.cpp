#include "claimdiff/reward.hpp"

#include <algorithm>
#include <cmath>

#include "claimdiff/errors.hpp"

namespace claimdiff {

double SeverityWeights::w_max() const { return std::max({w1, w2, w3}); }

double SeverityWeights::at(Severity s) const {
  switch (s) {
    case Severity::S1: return w1;
    case Severity::S2: return w2;
    case Severity::S3: return w3;
    case Severity::NA: return 0.0;
  }
  return 0.0;
}

void SeverityWeights::validate() const {
  if (!(w1 >= 0.0) || !(w2 >= 0.0) || !(w3 >= 0.0))
    throw Error(ErrorCode::InvalidWeights, "weights must be non-negative");
  if (!(w1 <= w2 && w2 <= w3))
    throw Error(ErrorCode::InvalidWeights,
                "weights must be monotone: w1 <= w2 <= w3");
}

std::string_view reward_mode_name(RewardMode mode) {
  switch (mode) {
    case RewardMode::Relative: return "relative";
    case RewardMode::ActorOnly: return "actor-only";
    case RewardMode::HolisticWithRef: return "holistic-ref";
    case RewardMode::HolisticNoRef: return "holistic-noref";
  }
  return "unknown";
}

RewardMode parse_reward_mode(std::string_view name) {
  if (name == "relative") return RewardMode::Relative;
  if (name == "actor-only") return RewardMode::ActorOnly;
  if (name == "holistic-ref") return RewardMode::HolisticWithRef;
  if (name == "holistic-noref") return RewardMode::HolisticNoRef;
  throw Error(ErrorCode::InvalidConfig,
              "unknown reward mode '" + std::string(name) + "'");
}

void RewardConfig::validate() const {
  weights.validate();
  if (!(neutral >= 0.0 && neutral <= 1.0))
    throw Error(ErrorCode::InvalidWeights, "neutral reward must lie in [0,1]");
}

namespace {

double side_weight(const SideError& err, int index, std::string_view side,
                   const SeverityWeights& weights,
                   std::vector<std::string>* warnings,
                   const std::map<std::string, Severity>* type_severity) {
  Severity sev = err.severity;
  if (sev == Severity::NA) {
    // Unreachable through parse_claimdiff; foreign stats may carry it.
    if (type_severity) {
      auto it = type_severity->find(err.type);
      if (it != type_severity->end()) sev = it->second;
    }
    if (sev == Severity::NA) {
      sev = Severity::S2;
      if (warnings)
        warnings->push_back("difference " + std::to_string(index) + ": " +
                            std::string(side) + " error '" + err.type +
                            "' has severity NA; treated as severity 2");
    }
  }
  return weights.at(sev);
}

}  // namespace

ErrorStats compute_stats(const ClaimDiffTranscript& transcript,
                         const SeverityWeights& weights,
                         std::vector<std::string>* warnings,
                         const std::map<std::string, Severity>* type_severity) {
  weights.validate();
  ErrorStats stats;
  stats.d = static_cast<int>(transcript.differences.size());
  stats.d_plus = std::max(stats.d, 1);
  stats.w_max = weights.w_max();
  for (const auto& rec : transcript.differences) {
    if (rec.consistency_warning && warnings)
      warnings->push_back("difference " + std::to_string(rec.index) +
                          ": judgment '" +
                          std::string(judgment_token(rec.judgment)) +
                          "' contradicts error fields; counted by error fields");
    if (!rec.error_a.is_none()) {
      stats.e_a += 1;
      stats.e_a_w += side_weight(rec.error_a, rec.index, "actor-side", weights,
                                 warnings, type_severity);
    }
    if (!rec.error_b.is_none()) {
      stats.e_b += 1;
      stats.e_b_w += side_weight(rec.error_b, rec.index, "reference-side",
                                 weights, warnings, type_severity);
    }
  }
  return stats;
}

double relative_reward(const ErrorStats& stats, const RewardConfig& config) {
  if (stats.d == 0) return config.neutral;
  const double ratio = (stats.e_a_w - stats.e_b_w) / (stats.w_max * stats.d_plus);
  const double clamped = std::clamp(ratio, -1.0, 1.0);
  return 0.5 - 0.5 * clamped;
}

double actor_only_reward(const ErrorStats& stats, const RewardConfig& config) {
  if (stats.d == 0) return config.neutral;
  const double density = stats.e_a_w / (stats.w_max * stats.d);
  return 1.0 - density;
}

double holistic_reward(const HolisticVerdict& verdict) {
  return verdict.score / 10.0;
}

}  // namespace claimdiff
