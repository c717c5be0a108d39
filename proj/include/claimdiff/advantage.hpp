#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace claimdiff {

enum class AdvantageMode { MeanBaseline, MeanStd };

std::string_view advantage_mode_name(AdvantageMode mode);
AdvantageMode parse_advantage_mode(std::string_view name);  // Error(InvalidConfig)

/// K sampled captions for one prompt with rewards and (after normalize)
/// advantages.
struct RolloutGroup {
  std::string prompt_id;
  std::vector<double> rewards;
  std::vector<double> advantages;
};

/// MeanBaseline: a_i = r_i - mean(r).
/// MeanStd:      a_i = (r_i - mean(r)) / max(std_pop(r), 1e-8).
/// Errors: EmptyGroup, NonFiniteReward(index).
RolloutGroup normalize(RolloutGroup group, AdvantageMode mode);

/// In-place variant over a bare reward vector.
std::vector<double> normalize_rewards(const std::vector<double>& rewards,
                                      AdvantageMode mode);

}  // namespace claimdiff
