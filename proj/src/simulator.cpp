#include "claimdiff/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "claimdiff/errors.hpp"

namespace claimdiff::sim {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// splitmix64, used to derive independent per-rollout streams.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
  return mix(mix(mix(mix(seed) ^ a) ^ b) ^ c);
}

const Claim* find_claim(const SyntheticCaption& caption,
                        const std::string& aspect_id) {
  for (const auto& claim : caption.claims)
    if (claim.aspect_id == aspect_id) return &claim;
  return nullptr;
}

struct SideVerdict {
  std::string type = "NONE";
  Severity severity = Severity::NA;
  std::string detail = "No error.";
};

SideVerdict judge_side(const Fact& fact, const Claim* claim, bool other_mentions,
                       double salient_threshold) {
  SideVerdict v;
  if (claim == nullptr) {
    if (fact.salience >= salient_threshold && other_mentions) {
      v.type = "detail_omission";
      v.severity = Severity::S2;
      v.detail = "omits the " + fact.aspect_id + " detail";
    }
    return v;
  }
  if (claim->value != fact.true_value) {
    v.type = "value_hallucination";
    v.severity = Severity::S3;
    v.detail = "claims " + claim->value + " but the image shows " +
               fact.true_value;
    return v;
  }
  if (claim->hedged) {
    v.type = "ambiguous_claim";
    v.severity = Severity::S1;
    v.detail = "hedges although the image is definite";
  }
  return v;
}

std::string claim_text(const Claim* claim) {
  if (claim == nullptr) return "not mentioned";
  if (claim->hedged) return "the " + claim->aspect_id + " is possibly " + claim->value;
  return "the " + claim->aspect_id + " is " + claim->value;
}

}  // namespace

std::string_view sim_reward_mode_name(SimRewardMode mode) {
  switch (mode) {
    case SimRewardMode::Relative: return "relative";
    case SimRewardMode::ActorOnly: return "actor-only";
    case SimRewardMode::Holistic: return "holistic";
  }
  return "unknown";
}

SimRewardMode parse_sim_reward_mode(std::string_view name) {
  if (name == "relative") return SimRewardMode::Relative;
  if (name == "actor-only") return SimRewardMode::ActorOnly;
  if (name == "holistic" || name == "holistic-ref" || name == "holistic-noref")
    return SimRewardMode::Holistic;
  throw Error(ErrorCode::InvalidConfig,
              "unknown simulator reward mode '" + std::string(name) + "'");
}

void SimConfig::validate() const {
  if (group_size < 2)
    throw Error(ErrorCode::InvalidConfig, "group_size must be >= 2");
  if (steps < 1) throw Error(ErrorCode::InvalidConfig, "steps must be >= 1");
  if (hall_penalty < 0.0 || miss_penalty < 0.0)
    throw Error(ErrorCode::InvalidConfig,
                "holistic coefficients must be >= 0");
  if (n_images < 1 || facts_per_image < 1 || value_vocab < 2)
    throw Error(ErrorCode::InvalidConfig, "world too small");
  weights.validate();
}

SyntheticImage make_image(int n_facts, int value_vocab, std::uint64_t seed) {
  SyntheticImage image;
  image.seed = seed;
  image.value_vocab = value_vocab;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> salience_dist(0.05, 1.0);
  std::uniform_int_distribution<int> value_dist(0, value_vocab - 1);
  image.facts.reserve(n_facts);
  for (int i = 0; i < n_facts; ++i) {
    Fact fact;
    fact.aspect_id = "a" + std::to_string(i);
    fact.true_value = "v" + std::to_string(value_dist(rng));
    fact.salience = salience_dist(rng);
    image.facts.push_back(std::move(fact));
  }
  return image;
}

SyntheticCaption sample_caption(const SyntheticImage& image,
                                const PolicyParams& params,
                                std::mt19937_64& rng) {
  SyntheticCaption caption;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double p_emit_base = sigmoid(params.emit_logit);
  const double p_corrupt = sigmoid(params.err_logit);
  const double p_hedge = sigmoid(params.hedge_logit);
  for (const auto& fact : image.facts) {
    if (uniform(rng) >= p_emit_base * fact.salience) continue;
    Claim claim;
    claim.aspect_id = fact.aspect_id;
    claim.value = fact.true_value;
    if (uniform(rng) < p_corrupt) {
      std::uniform_int_distribution<int> other(0, image.value_vocab - 2);
      int pick = other(rng);
      const std::string truth = fact.true_value;
      for (int v = 0, seen = 0; v < image.value_vocab; ++v) {
        std::string candidate = "v" + std::to_string(v);
        if (candidate == truth) continue;
        if (seen++ == pick) {
          claim.value = std::move(candidate);
          break;
        }
      }
    }
    claim.hedged = uniform(rng) < p_hedge;
    caption.claims.push_back(std::move(claim));
  }
  return caption;
}

std::string render_caption(const SyntheticCaption& caption) {
  std::string text;
  for (const auto& claim : caption.claims) {
    if (!text.empty()) text += ' ';
    text += claim_text(&claim) + ".";
  }
  return text;
}

ClaimDiffTranscript scripted_claimdiff_judge(const SyntheticImage& image,
                                             const SyntheticCaption& caption_a,
                                             const SyntheticCaption& caption_b,
                                             double salient_threshold) {
  ClaimDiffTranscript transcript;
  int index = 0;
  int errors_a = 0, errors_b = 0;
  for (const auto& fact : image.facts) {
    const Claim* a = find_claim(caption_a, fact.aspect_id);
    const Claim* b = find_claim(caption_b, fact.aspect_id);
    if (a == nullptr && b == nullptr) continue;
    const bool same_claim = a != nullptr && b != nullptr &&
                            a->value == b->value && a->hedged == b->hedged;
    if (same_claim) continue;

    SideVerdict va = judge_side(fact, a, b != nullptr, salient_threshold);
    SideVerdict vb = judge_side(fact, b, a != nullptr, salient_threshold);
    DifferenceRecord rec;
    rec.index = ++index;
    rec.aspect = fact.aspect_id;
    rec.claim_a = claim_text(a);
    rec.claim_b = claim_text(b);
    rec.error_a = SideError{va.type, va.detail, va.severity};
    rec.error_b = SideError{vb.type, vb.detail, vb.severity};
    const bool a_clean = rec.error_a.is_none();
    const bool b_clean = rec.error_b.is_none();
    if (a_clean && b_clean) rec.judgment = a ? Judgment::A : Judgment::B;
    else if (a_clean) rec.judgment = Judgment::A;
    else if (b_clean) rec.judgment = Judgment::B;
    else rec.judgment = Judgment::BothWrong;
    errors_a += a_clean ? 0 : 1;
    errors_b += b_clean ? 0 : 1;
    transcript.differences.push_back(std::move(rec));
  }
  transcript.overall_winner = errors_a < errors_b   ? Winner::A
                              : errors_b < errors_a ? Winner::B
                                                    : Winner::Tie;
  return transcript;
}

HolisticVerdict scripted_holistic_judge(const SyntheticImage& image,
                                        const SyntheticCaption& caption,
                                        double hall_penalty,
                                        double miss_penalty,
                                        double salient_threshold) {
  int wrong = 0, missing_salient = 0;
  for (const auto& fact : image.facts) {
    const Claim* claim = find_claim(caption, fact.aspect_id);
    if (claim == nullptr) {
      if (fact.salience >= salient_threshold) ++missing_salient;
    } else if (claim->value != fact.true_value) {
      ++wrong;
    }
  }
  const double raw =
      10.0 - hall_penalty * wrong - miss_penalty * missing_salient;
  const int score =
      static_cast<int>(std::lround(std::clamp(raw, 0.0, 10.0)));
  return HolisticVerdict{score, "scripted"};
}

namespace {

struct RolloutGrad {
  double emit = 0.0;
  double err = 0.0;
  double hedge = 0.0;
};

// Score-function gradient of the rollout's log-probability in the three
// shared logits. Emission is a salience-scaled Bernoulli.
RolloutGrad log_prob_grad(const SyntheticImage& image,
                          const SyntheticCaption& caption,
                          const PolicyParams& params) {
  RolloutGrad grad;
  const double se = sigmoid(params.emit_logit);
  const double sc = sigmoid(params.err_logit);
  const double sh = sigmoid(params.hedge_logit);
  for (const auto& fact : image.facts) {
    const Claim* claim = find_claim(caption, fact.aspect_id);
    const double p_emit = se * fact.salience;
    if (claim == nullptr) {
      grad.emit += -se * (1.0 - se) * fact.salience / (1.0 - p_emit);
      continue;
    }
    grad.emit += 1.0 - se;
    grad.err += (claim->value != fact.true_value) ? (1.0 - sc) : -sc;
    grad.hedge += claim->hedged ? (1.0 - sh) : -sh;
  }
  return grad;
}

struct WorldState {
  std::vector<SyntheticImage> images;
  std::vector<SyntheticCaption> references;
};

WorldState make_world(const SimConfig& config) {
  WorldState world;
  world.images.reserve(config.n_images);
  world.references.reserve(config.n_images);
  for (int i = 0; i < config.n_images; ++i) {
    SyntheticImage image = make_image(
        config.facts_per_image, config.value_vocab,
        stream_seed(config.seed, 0x77ULL, static_cast<std::uint64_t>(i), 0));
    // Fixed strong reference policy: near-full salient coverage, low
    // corruption, no hedging.
    std::mt19937_64 rng(
        stream_seed(config.seed, 0x7eULL, static_cast<std::uint64_t>(i), 1));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    SyntheticCaption reference;
    for (const auto& fact : image.facts) {
      const double p = fact.salience >= config.salient_threshold
                           ? config.ref_emit_prob
                           : config.ref_emit_prob * fact.salience;
      if (uniform(rng) >= p) continue;
      Claim claim;
      claim.aspect_id = fact.aspect_id;
      claim.value = fact.true_value;
      if (uniform(rng) < config.ref_corrupt_rate) {
        std::uniform_int_distribution<int> other(0, image.value_vocab - 2);
        int pick = other(rng);
        for (int v = 0, seen = 0; v < image.value_vocab; ++v) {
          std::string candidate = "v" + std::to_string(v);
          if (candidate == fact.true_value) continue;
          if (seen++ == pick) {
            claim.value = std::move(candidate);
            break;
          }
        }
      }
      reference.claims.push_back(std::move(claim));
    }
    world.images.push_back(std::move(image));
    world.references.push_back(std::move(reference));
  }
  return world;
}

}  // namespace

SimResult run_training(const SimConfig& config) {
  config.validate();
  const WorldState world = make_world(config);

  RewardConfig reward_config;
  reward_config.weights = config.weights;
  reward_config.neutral = config.neutral;

  const bool claimdiff_mode = config.reward_mode != SimRewardMode::Holistic;
  std::optional<AmbiguityDetector> detector;
  if (claimdiff_mode && config.ambiguity_enabled)
    detector.emplace(AmbiguityConfig::defaults());

  PolicyParams params = config.init;
  SimResult result;
  result.trajectory.reserve(config.steps);

  const int rollouts_per_step = config.n_images * config.group_size;

  for (int step = 0; step < config.steps; ++step) {
    RolloutGrad total;
    double sum_reward = 0.0, sum_length = 0.0, sum_hall = 0.0,
           sum_miss = 0.0, sum_ref_werr = 0.0;

    for (int i = 0; i < config.n_images; ++i) {
      const SyntheticImage& image = world.images[i];
      const SyntheticCaption& reference = world.references[i];

      std::vector<SyntheticCaption> captions(config.group_size);
      std::vector<RolloutGrad> grads(config.group_size);
      std::vector<double> rewards(config.group_size);

      for (int k = 0; k < config.group_size; ++k) {
        std::mt19937_64 rng(stream_seed(
            config.seed, static_cast<std::uint64_t>(step) + 1,
            static_cast<std::uint64_t>(i),
            static_cast<std::uint64_t>(k) + 2));
        captions[k] = sample_caption(image, params, rng);
        grads[k] = log_prob_grad(image, captions[k], params);

        const ClaimDiffTranscript transcript = scripted_claimdiff_judge(
            image, captions[k], reference, config.salient_threshold);
        const ErrorStats stats =
            compute_stats(transcript, config.weights);
        sum_ref_werr += stats.e_b_w;

        double reward = 0.0;
        switch (config.reward_mode) {
          case SimRewardMode::Relative:
            reward = relative_reward(stats, reward_config);
            break;
          case SimRewardMode::ActorOnly:
            reward = actor_only_reward(stats, reward_config);
            break;
          case SimRewardMode::Holistic:
            reward = holistic_reward(scripted_holistic_judge(
                image, captions[k], config.hall_penalty, config.miss_penalty,
                config.salient_threshold));
            break;
        }
        const std::string text = render_caption(captions[k]);
        if (detector) reward = apply_penalty(reward, detector->detect(text));
        rewards[k] = reward;
        sum_reward += reward;
        sum_length += count_words(text);

        // True-world diagnostics, independent of the reward path.
        int hall = 0, miss = 0;
        for (const auto& fact : image.facts) {
          const Claim* claim = find_claim(captions[k], fact.aspect_id);
          if (claim == nullptr) {
            if (fact.salience >= config.salient_threshold) ++miss;
          } else if (claim->value != fact.true_value) {
            ++hall;
          }
        }
        sum_hall += hall;
        sum_miss += miss;
      }

      const std::vector<double> advantages =
          normalize_rewards(rewards, config.advantage_mode);
      for (int k = 0; k < config.group_size; ++k) {
        total.emit += advantages[k] * grads[k].emit;
        total.err += advantages[k] * grads[k].err;
        total.hedge += advantages[k] * grads[k].hedge;
      }
    }

    TrajectoryPoint point;
    point.step = step;
    point.mean_reward = sum_reward / rollouts_per_step;
    point.mean_length = sum_length / rollouts_per_step;
    point.mean_hall = sum_hall / rollouts_per_step;
    point.mean_miss = sum_miss / rollouts_per_step;
    point.mean_ref_werr = sum_ref_werr / rollouts_per_step;
    point.emit_logit = params.emit_logit;
    point.err_logit = params.err_logit;
    point.hedge_logit = params.hedge_logit;
    result.trajectory.push_back(point);

    const double scale = config.learning_rate / rollouts_per_step;
    params.emit_logit += scale * total.emit;
    params.err_logit += scale * total.err;
    params.hedge_logit += scale * total.hedge;
    if (!std::isfinite(params.emit_logit) || !std::isfinite(params.err_logit) ||
        !std::isfinite(params.hedge_logit))
      throw Error(ErrorCode::DivergedParams,
                  "policy logits became non-finite at step " +
                      std::to_string(step));
  }

  result.final_params = params;
  return result;
}

}  // namespace claimdiff::sim
