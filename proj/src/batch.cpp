#include "claimdiff/batch.hpp"

#include <atomic>
#include <istream>
#include <map>
#include <thread>

#include <json.hpp>

#include "claimdiff/advantage.hpp"
#include "claimdiff/errors.hpp"

namespace claimdiff {

using nlohmann::json;
using nlohmann::ordered_json;

BatchRecord parse_batch_record(const std::string& line) {
  json obj = json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object())
    throw Error(ErrorCode::InputMalformed, "line is not a JSON object");
  BatchRecord record;
  if (!obj.contains("id") || !obj["id"].is_string())
    throw Error(ErrorCode::InputMalformed, "missing string field 'id'");
  record.id = obj["id"].get<std::string>();
  record.prompt_id = obj.value("prompt_id", record.id);
  record.image_ref = obj.value("image_ref", "");
  if (!obj.contains("actor_caption") || !obj["actor_caption"].is_string())
    throw Error(ErrorCode::InputMalformed,
                "missing string field 'actor_caption'");
  record.actor_caption = obj["actor_caption"].get<std::string>();
  if (obj.contains("reference_caption") && obj["reference_caption"].is_string())
    record.reference_caption = obj["reference_caption"].get<std::string>();
  return record;
}

std::vector<BatchRecord> read_batch_records(std::istream& in,
                                            std::vector<std::string>* errors) {
  std::vector<BatchRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(parse_batch_record(line));
    } catch (const Error& e) {
      BatchRecord placeholder;
      placeholder.id = "line" + std::to_string(line_no);
      placeholder.prompt_id = placeholder.id;
      placeholder.actor_caption.clear();
      records.push_back(placeholder);
      if (errors)
        errors->push_back(placeholder.id + ": " + e.what());
      else
        throw;
      // Mark the record invalid by storing the message in reference slot
      // cleared below; run_batch re-detects missing captions.
      records.back().reference_caption.reset();
      records.back().image_ref = "";
      records.back().actor_caption = "";
      records.back().prompt_id = placeholder.id;
      records.back().id = placeholder.id + ":malformed:" + e.what();
    }
  }
  return records;
}

namespace {

ordered_json failed_line(const BatchRecord& record, const RewardConfig& config,
                         std::string_view status, const std::string& error) {
  ordered_json out;
  out["id"] = record.id;
  if (!record.prompt_id.empty() && record.prompt_id != record.id)
    out["prompt_id"] = record.prompt_id;
  out["mode"] = std::string(reward_mode_name(config.mode));
  out["status"] = std::string(status);
  out["error"] = error;
  return out;
}

struct ScoreResult {
  ordered_json reward_line;
  std::optional<ordered_json> amb_line;
  bool failed = false;
};

ScoreResult score_record(const BatchRecord& record, const BatchOptions& options,
                         judge::JudgeClient& client,
                         const AmbiguityDetector* detector) {
  ScoreResult result;
  const RewardConfig& reward_config = options.reward;

  const bool needs_reference = reward_config.mode == RewardMode::Relative ||
                               reward_config.mode == RewardMode::ActorOnly ||
                               reward_config.mode == RewardMode::HolisticWithRef;
  if (needs_reference && !record.reference_caption) {
    result.reward_line = failed_line(
        record, reward_config, "error",
        "InputMalformed: reference_caption required in mode " +
            std::string(reward_mode_name(reward_config.mode)));
    result.failed = true;
    return result;
  }

  judge::JudgeRequest request;
  request.sample_id = record.id;
  request.image_ref = record.image_ref;
  if (reward_config.mode == RewardMode::Relative ||
      reward_config.mode == RewardMode::ActorOnly) {
    request.mode = PromptMode::ClaimDiff;
    request.slots = {{"caption_a", record.actor_caption},
                     {"caption_b", *record.reference_caption}};
  } else if (reward_config.mode == RewardMode::HolisticWithRef) {
    request.mode = PromptMode::HolisticWithRef;
    request.slots = {{"actor_caption", record.actor_caption},
                     {"reference_caption", *record.reference_caption}};
  } else {
    request.mode = PromptMode::HolisticNoRef;
    request.slots = {{"actor_caption", record.actor_caption}};
  }

  if (options.dry_run) {
    render_prompt(request.mode, request.slots);  // validates the slots
    ordered_json out;
    out["id"] = record.id;
    if (!record.prompt_id.empty() && record.prompt_id != record.id)
      out["prompt_id"] = record.prompt_id;
    out["mode"] = std::string(reward_mode_name(reward_config.mode));
    out["status"] = "dry_run";
    result.reward_line = std::move(out);
    return result;
  }

  judge::QueryResult reply = client.query(request);
  if (reply.status != judge::QueryStatus::Ok) {
    result.reward_line =
        failed_line(record, reward_config,
                    judge::query_status_name(reply.status), reply.error);
    result.failed = true;
    return result;
  }

  std::vector<std::string> warnings;
  ErrorStats stats;
  double reward_raw = 0.0;
  if (const auto* transcript = std::get_if<ClaimDiffTranscript>(&reply.parsed)) {
    stats = compute_stats(*transcript, reward_config.weights, &warnings,
                          &reward_config.type_severity);
    reward_raw = reward_config.mode == RewardMode::Relative
                     ? relative_reward(stats, reward_config)
                     : actor_only_reward(stats, reward_config);
  } else if (const auto* verdict = std::get_if<HolisticVerdict>(&reply.parsed)) {
    stats.w_max = reward_config.weights.w_max();
    reward_raw = holistic_reward(*verdict);
  } else {
    result.reward_line = failed_line(record, reward_config, "error",
                                     "unexpected parse result for mode");
    result.failed = true;
    return result;
  }

  double reward_final = reward_raw;
  if (detector != nullptr) {
    const AmbiguityReport report = detector->detect(record.actor_caption);
    reward_final = apply_penalty(reward_raw, report);
    ordered_json amb;
    amb["id"] = record.id;
    amb["words"] = count_words(record.actor_caption);
    amb["n_amb"] = report.n_amb;
    amb["n_free"] = report.n_free;
    amb["excess"] = report.excess;
    amb["factor"] = report.factor;
    ordered_json matches = ordered_json::array();
    for (const auto& m : report.matches) {
      matches.push_back({{"class", std::string(pattern_class_name(m.cls))},
                         {"span", m.span},
                         {"word_offset", m.word_offset}});
    }
    amb["matches"] = std::move(matches);
    result.amb_line = std::move(amb);
  }

  ordered_json out;
  out["id"] = record.id;
  if (!record.prompt_id.empty() && record.prompt_id != record.id)
    out["prompt_id"] = record.prompt_id;
  out["mode"] = std::string(reward_mode_name(reward_config.mode));
  out["d"] = stats.d;
  out["e_a"] = stats.e_a;
  out["e_b"] = stats.e_b;
  out["e_a_w"] = stats.e_a_w;
  out["e_b_w"] = stats.e_b_w;
  out["reward_raw"] = reward_raw;
  out["reward_final"] = reward_final;
  out["warnings"] = warnings;
  out["status"] = "ok";
  result.reward_line = std::move(out);
  return result;
}

}  // namespace

BatchOutcome run_batch(const std::vector<BatchRecord>& records,
                       const BatchOptions& options) {
  options.reward.validate();
  judge::JudgeClient client(options.backend);

  std::optional<AmbiguityDetector> detector;
  if (options.penalty_enabled()) detector.emplace(options.ambiguity);
  const AmbiguityDetector* detector_ptr = detector ? &*detector : nullptr;

  std::vector<ScoreResult> results(records.size());
  const int jobs = std::max(1, options.jobs);
  if (jobs == 1 || records.size() <= 1) {
    for (size_t i = 0; i < records.size(); ++i)
      results[i] = score_record(records[i], options, client, detector_ptr);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&] {
      while (true) {
        const size_t i = next.fetch_add(1);
        if (i >= records.size()) return;
        results[i] = score_record(records[i], options, client, detector_ptr);
      }
    };
    std::vector<std::thread> pool;
    const int n_workers =
        static_cast<int>(std::min<size_t>(jobs, records.size()));
    pool.reserve(n_workers);
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  BatchOutcome outcome;
  outcome.backend_requests = client.requests_issued();
  for (auto& r : results) {
    outcome.reward_lines.push_back(r.reward_line.dump());
    if (r.amb_line) outcome.amb_lines.push_back(r.amb_line->dump());
    if (r.failed) ++outcome.n_failed;
  }
  return outcome;
}

std::vector<std::string> advantages_from_reward_lines(
    const std::vector<std::string>& lines, AdvantageMode mode) {
  struct Row {
    std::string id;
    std::string prompt_id;
    double reward = 0.0;
    bool ok = false;
  };
  std::vector<Row> rows;
  rows.reserve(lines.size());
  for (size_t i = 0; i < lines.size(); ++i) {
    json obj = json::parse(lines[i], nullptr, false);
    if (obj.is_discarded() || !obj.is_object())
      throw Error(ErrorCode::InputMalformed,
                  "reward line " + std::to_string(i + 1) + " is not JSON");
    Row row;
    row.id = obj.value("id", "");
    row.prompt_id = obj.value("prompt_id", row.id);
    row.ok = obj.value("status", "ok") == "ok" && obj.contains("reward_final");
    if (row.ok) row.reward = obj["reward_final"].get<double>();
    rows.push_back(std::move(row));
  }

  // Group scored rows by prompt_id, preserving encounter order.
  std::map<std::string, std::vector<size_t>> groups;
  std::vector<std::string> group_order;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].ok) continue;
    auto [it, inserted] = groups.try_emplace(rows[i].prompt_id);
    if (inserted) group_order.push_back(rows[i].prompt_id);
    it->second.push_back(i);
  }

  std::vector<double> advantage_of(rows.size(), 0.0);
  for (const auto& key : group_order) {
    const auto& members = groups[key];
    std::vector<double> rewards;
    rewards.reserve(members.size());
    for (size_t idx : members) rewards.push_back(rows[idx].reward);
    const std::vector<double> advantages = normalize_rewards(rewards, mode);
    for (size_t j = 0; j < members.size(); ++j)
      advantage_of[members[j]] = advantages[j];
  }

  std::vector<std::string> out;
  out.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    ordered_json line;
    line["prompt_id"] = rows[i].prompt_id;
    line["id"] = rows[i].id;
    if (rows[i].ok) {
      line["reward"] = rows[i].reward;
      line["advantage"] = advantage_of[i];
      line["status"] = "ok";
    } else {
      line["status"] = "skipped";
    }
    out.push_back(line.dump());
  }
  return out;
}

}  // namespace claimdiff
