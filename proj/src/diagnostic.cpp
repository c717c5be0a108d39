#include "claimdiff/diagnostic.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

#include "claimdiff/errors.hpp"

namespace claimdiff {

namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

[[noreturn]] void unknown_token(std::string_view field, std::string_view token) {
  throw Error(ErrorCode::UnknownEnumToken,
              std::string(field) + " '" + std::string(token) + "'");
}

// Wire tokens are lower-case snake; capitalized variants are accepted.
DiffType parse_diff_type(std::string_view token) {
  std::string t = lower(token);
  if (t == "contradiction") return DiffType::Contradiction;
  if (t == "extra_info") return DiffType::ExtraInfo;
  if (t == "missing_fact") return DiffType::MissingFact;
  unknown_token("type", token);
}

DiffCategory parse_category(std::string_view token) {
  std::string t = lower(token);
  if (t == "natural") return DiffCategory::Natural;
  if (t == "design") return DiffCategory::Design;
  unknown_token("category", token);
}

Verification parse_verification(std::string_view token) {
  std::string t = lower(token);
  if (t == "verified") return Verification::Verified;
  if (t == "false") return Verification::False;
  if (t == "ambiguous") return Verification::Ambiguous;
  if (t == "missing") return Verification::Missing;
  unknown_token("verification", token);
}

ClaimJudgment parse_claim_judgment(std::string_view token) {
  std::string t = lower(token);
  if (t == "supported") return ClaimJudgment::Supported;
  if (t == "hallucination") return ClaimJudgment::Hallucination;
  if (t == "uncertain") return ClaimJudgment::Uncertain;
  unknown_token("judgment", token);
}

Coverage parse_coverage(std::string_view token) {
  std::string t = lower(token);
  if (t == "covered") return Coverage::Covered;
  if (t == "partially_covered") return Coverage::PartiallyCovered;
  if (t == "missing") return Coverage::Missing;
  if (t == "uncertain") return Coverage::Uncertain;
  unknown_token("coverage", token);
}

// Strips an optional markdown code fence around the JSON payload.
std::string_view strip_fence(std::string_view text) {
  size_t b = text.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return text;
  if (text.substr(b, 3) != "```") return text;
  size_t line_end = text.find('\n', b);
  if (line_end == std::string_view::npos) return text;
  size_t close = text.rfind("```");
  if (close <= line_end) return text;
  return text.substr(line_end + 1, close - line_end - 1);
}

json parse_json(std::string_view text) {
  json parsed = json::parse(strip_fence(text), nullptr, false);
  if (parsed.is_discarded())
    throw Error(ErrorCode::MalformedJson, "judge response is not valid JSON");
  return parsed;
}

std::string get_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

std::string require_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string())
    throw Error(ErrorCode::MalformedJson,
                std::string("missing or non-string field '") + key + "'");
  return it->get<std::string>();
}

}  // namespace

std::string_view diff_type_token(DiffType t) {
  switch (t) {
    case DiffType::Contradiction: return "contradiction";
    case DiffType::ExtraInfo: return "extra_info";
    case DiffType::MissingFact: return "missing_fact";
  }
  return "";
}

std::string_view diff_category_token(DiffCategory c) {
  switch (c) {
    case DiffCategory::Natural: return "natural";
    case DiffCategory::Design: return "design";
  }
  return "";
}

std::string_view verification_token(Verification v) {
  switch (v) {
    case Verification::Verified: return "verified";
    case Verification::False: return "false";
    case Verification::Ambiguous: return "ambiguous";
    case Verification::Missing: return "missing";
  }
  return "";
}

bool map_hallucination(DiffType diff_type, Verification verification) {
  if (diff_type == DiffType::MissingFact) {
    if (verification != Verification::Missing)
      throw Error(ErrorCode::IllegalPair,
                  "missing_fact must carry verification 'missing', got '" +
                      std::string(verification_token(verification)) + "'");
    return false;  // omission, never a hallucination
  }
  if (verification == Verification::Missing)
    throw Error(ErrorCode::IllegalPair,
                "verification 'missing' is only legal for missing_fact, got '" +
                    std::string(diff_type_token(diff_type)) + "'");
  return verification == Verification::False;
}

SampleDiagnosis parse_diagnosis_with_ref(std::string_view json_text,
                                         std::string sample_id) {
  json root = parse_json(json_text);
  if (!root.is_object())
    throw Error(ErrorCode::MalformedJson, "top-level value is not an object");

  SampleDiagnosis out;
  out.sample_id = std::move(sample_id);
  auto diffs = root.find("differences");
  if (diffs == root.end() || !diffs->is_array())
    throw Error(ErrorCode::MalformedJson, "missing 'differences' array");

  for (const auto& item : *diffs) {
    if (!item.is_object())
      throw Error(ErrorCode::MalformedJson, "difference entry is not an object");
    DiagnosticDifference diff;
    diff.diff_type = parse_diff_type(require_string(item, "type"));
    diff.content = get_string(item, "content");
    diff.category = parse_category(require_string(item, "category"));
    diff.verification = parse_verification(require_string(item, "verification"));
    diff.reason = get_string(item, "reason");
    diff.recomputed_hallucination =
        map_hallucination(diff.diff_type, diff.verification);
    auto flag = item.find("is_hallucination");
    if (flag != item.end() && flag->is_boolean()) {
      diff.judge_hallucination_flag = flag->get<bool>();
      if (diff.judge_hallucination_flag != diff.recomputed_hallucination) {
        out.warnings.push_back(
            "difference '" + diff.content + "': judge reported is_hallucination=" +
            (diff.judge_hallucination_flag ? "true" : "false") +
            " but (" + std::string(diff_type_token(diff.diff_type)) + ", " +
            std::string(verification_token(diff.verification)) +
            ") maps to " + (diff.recomputed_hallucination ? "true" : "false"));
      }
    } else {
      diff.judge_hallucination_flag = diff.recomputed_hallucination;
    }
    if (diff.recomputed_hallucination) ++out.hall_count;
    if (diff.diff_type == DiffType::MissingFact) ++out.miss_count;
    out.differences.push_back(std::move(diff));
  }
  return out;
}

NoRefDiagnosis parse_diagnosis_no_ref(std::string_view json_text,
                                      std::string sample_id) {
  json root = parse_json(json_text);
  if (!root.is_object())
    throw Error(ErrorCode::MalformedJson, "top-level value is not an object");

  NoRefDiagnosis out;
  out.sample_id = std::move(sample_id);

  auto claims = root.find("claims");
  if (claims == root.end() || !claims->is_array())
    throw Error(ErrorCode::MalformedJson, "missing 'claims' array");
  for (const auto& item : *claims) {
    if (!item.is_object())
      throw Error(ErrorCode::MalformedJson, "claim entry is not an object");
    NoRefClaim claim;
    claim.claim = get_string(item, "claim");
    claim.aspect = get_string(item, "aspect");
    claim.judgment = parse_claim_judgment(require_string(item, "judgment"));
    claim.evidence = get_string(item, "evidence");
    if (claim.judgment == ClaimJudgment::Hallucination) ++out.hall_count;
    out.claims.push_back(std::move(claim));
  }

  auto facts = root.find("missing_facts");
  if (facts == root.end() || !facts->is_array())
    throw Error(ErrorCode::MalformedJson, "missing 'missing_facts' array");
  for (const auto& item : *facts) {
    if (!item.is_object())
      throw Error(ErrorCode::MalformedJson, "missing_fact entry is not an object");
    NoRefMissingFact fact;
    fact.fact = get_string(item, "fact");
    fact.aspect = get_string(item, "aspect");
    fact.coverage = parse_coverage(require_string(item, "coverage"));
    fact.caption_evidence = get_string(item, "caption_evidence");
    fact.reason = get_string(item, "reason");
    if (fact.coverage == Coverage::Missing) ++out.miss_count;
    out.missing_facts.push_back(std::move(fact));
  }
  return out;
}

DiagnosticAggregate aggregate(const std::vector<SampleDiagnosis>& samples) {
  if (samples.empty())
    throw Error(ErrorCode::EmptyBenchmark, "no samples to aggregate");
  DiagnosticAggregate agg;
  agg.n_samples = static_cast<int>(samples.size());
  long hall_total = 0, miss_total = 0;
  for (const auto& s : samples) {
    hall_total += s.hall_count;
    miss_total += s.miss_count;
    if (s.has_hallucination()) ++agg.samples_with_hallucination;
    for (const auto& d : s.differences) {
      CategoryCounts& bucket =
          d.category == DiffCategory::Natural ? agg.natural : agg.design;
      if (d.recomputed_hallucination) ++bucket.hall;
      if (d.diff_type == DiffType::MissingFact) ++bucket.miss;
    }
  }
  agg.mean_hall = static_cast<double>(hall_total) / agg.n_samples;
  agg.mean_miss = static_cast<double>(miss_total) / agg.n_samples;
  return agg;
}

DiagnosticAggregate aggregate_counts(
    const std::vector<std::pair<int, int>>& hall_miss) {
  if (hall_miss.empty())
    throw Error(ErrorCode::EmptyBenchmark, "no samples to aggregate");
  DiagnosticAggregate agg;
  agg.n_samples = static_cast<int>(hall_miss.size());
  long hall_total = 0, miss_total = 0;
  for (const auto& [hall, miss] : hall_miss) {
    hall_total += hall;
    miss_total += miss;
    if (hall > 0) ++agg.samples_with_hallucination;
  }
  agg.mean_hall = static_cast<double>(hall_total) / agg.n_samples;
  agg.mean_miss = static_cast<double>(miss_total) / agg.n_samples;
  return agg;
}

DiagnosticComparison compare_runs(const DiagnosticAggregate& ref,
                                  const DiagnosticAggregate& no_ref) {
  DiagnosticComparison cmp;
  cmp.ref = ref;
  cmp.no_ref = no_ref;
  cmp.hall_difference = no_ref.mean_hall - ref.mean_hall;
  cmp.miss_difference = no_ref.mean_miss - ref.mean_miss;
  cmp.samples_with_hall_difference =
      no_ref.samples_with_hallucination - ref.samples_with_hallucination;
  return cmp;
}

}  // namespace claimdiff
