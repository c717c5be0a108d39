#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace claimdiff {

enum class DiffType { Contradiction, ExtraInfo, MissingFact };
enum class DiffCategory { Natural, Design };
enum class Verification { Verified, False, Ambiguous, Missing };

std::string_view diff_type_token(DiffType t);          // "contradiction", ...
std::string_view diff_category_token(DiffCategory c);  // "natural", "design"
std::string_view verification_token(Verification v);   // "verified", ...

/// Deterministic hallucination mapping: true exactly for
/// (Contradiction, False) and (ExtraInfo, False). MissingFact pairs only
/// with Missing; any other combination is Error(IllegalPair).
bool map_hallucination(DiffType diff_type, Verification verification);

struct DiagnosticDifference {
  DiffType diff_type = DiffType::ExtraInfo;
  std::string content;
  DiffCategory category = DiffCategory::Natural;
  Verification verification = Verification::Ambiguous;
  std::string reason;
  bool judge_hallucination_flag = false;  // as reported by the judge
  bool recomputed_hallucination = false;  // from the mapping table
};

struct SampleDiagnosis {
  std::string sample_id;
  std::vector<DiagnosticDifference> differences;
  int hall_count = 0;  // recomputed hallucinations
  int miss_count = 0;  // missing_fact items
  std::vector<std::string> warnings;  // judge-flag discrepancies

  bool has_hallucination() const { return hall_count > 0; }
};

enum class ClaimJudgment { Supported, Hallucination, Uncertain };
enum class Coverage { Covered, PartiallyCovered, Missing, Uncertain };

struct NoRefClaim {
  std::string claim;
  std::string aspect;
  ClaimJudgment judgment = ClaimJudgment::Uncertain;
  std::string evidence;
};

struct NoRefMissingFact {
  std::string fact;
  std::string aspect;
  Coverage coverage = Coverage::Uncertain;
  std::string caption_evidence;
  std::string reason;
};

struct NoRefDiagnosis {
  std::string sample_id;
  std::vector<NoRefClaim> claims;
  std::vector<NoRefMissingFact> missing_facts;
  int hall_count = 0;  // claims judged HALLUCINATION
  int miss_count = 0;  // facts with coverage MISSING
};

/// Parses the reference-conditioned judge JSON, recomputing every
/// hallucination flag from the mapping table (the judge-reported flag is
/// overridden; a discrepancy warning is recorded when they differ).
/// Errors: MalformedJson, UnknownEnumToken, IllegalPair.
SampleDiagnosis parse_diagnosis_with_ref(std::string_view json_text,
                                         std::string sample_id = {});

/// Parses the no-reference judge JSON (claims + missing-fact checklist).
/// Errors: MalformedJson, UnknownEnumToken.
NoRefDiagnosis parse_diagnosis_no_ref(std::string_view json_text,
                                      std::string sample_id = {});

struct CategoryCounts {
  int hall = 0;
  int miss = 0;
};

struct DiagnosticAggregate {
  double mean_hall = 0.0;
  double mean_miss = 0.0;
  int n_samples = 0;
  int samples_with_hallucination = 0;
  CategoryCounts natural;
  CategoryCounts design;
};

/// Unweighted means over samples; Error(EmptyBenchmark) on an empty list.
DiagnosticAggregate aggregate(const std::vector<SampleDiagnosis>& samples);

/// Aggregate over bare (hall, miss) counts; used for no-reference runs,
/// which carry no category tags.
DiagnosticAggregate aggregate_counts(
    const std::vector<std::pair<int, int>>& hall_miss);

/// Side-by-side comparison of a reference-conditioned and a no-reference
/// aggregate (difference = no_ref - ref).
struct DiagnosticComparison {
  DiagnosticAggregate ref;
  DiagnosticAggregate no_ref;
  double hall_difference = 0.0;
  double miss_difference = 0.0;
  int samples_with_hall_difference = 0;
};

DiagnosticComparison compare_runs(const DiagnosticAggregate& ref,
                                  const DiagnosticAggregate& no_ref);

}  // namespace claimdiff
