#include "claimdiff/advantage.hpp"

#include <algorithm>
#include <cmath>

#include "claimdiff/errors.hpp"

namespace claimdiff {

std::string_view advantage_mode_name(AdvantageMode mode) {
  switch (mode) {
    case AdvantageMode::MeanBaseline: return "mean-baseline";
    case AdvantageMode::MeanStd: return "mean-std";
  }
  return "unknown";
}

AdvantageMode parse_advantage_mode(std::string_view name) {
  if (name == "mean-baseline") return AdvantageMode::MeanBaseline;
  if (name == "mean-std") return AdvantageMode::MeanStd;
  throw Error(ErrorCode::InvalidConfig,
              "unknown advantage mode '" + std::string(name) + "'");
}

std::vector<double> normalize_rewards(const std::vector<double>& rewards,
                                      AdvantageMode mode) {
  if (rewards.empty())
    throw Error(ErrorCode::EmptyGroup, "rollout group has no rewards");
  for (size_t i = 0; i < rewards.size(); ++i) {
    if (!std::isfinite(rewards[i]))
      throw Error(ErrorCode::NonFiniteReward,
                  "reward at index " + std::to_string(i));
  }
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;

  std::vector<double> advantages(rewards.size());
  for (size_t i = 0; i < rewards.size(); ++i) advantages[i] = rewards[i] - mean;

  if (mode == AdvantageMode::MeanStd) {
    double var = 0.0;
    for (double a : advantages) var += a * a;
    var /= n;  // population variance
    const double denom = std::max(std::sqrt(var), 1e-8);
    for (double& a : advantages) a /= denom;
  }
  return advantages;
}

RolloutGroup normalize(RolloutGroup group, AdvantageMode mode) {
  group.advantages = normalize_rewards(group.rewards, mode);
  return group;
}

}  // namespace claimdiff
