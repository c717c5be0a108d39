#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "claimdiff/ambiguity.hpp"
#include "claimdiff/diagnostic.hpp"

namespace claimdiff {

struct MedcSample {
  int e_a = 0;
  int e_b = 0;
};

/// Mean actor-minus-reference unweighted error count. Error(EmptyInput).
double medc(std::span<const MedcSample> samples);

/// (total matches / total words) * 100. Errors: LengthMismatch, ZeroWords.
double ambiguity_rate(std::span<const AmbiguityReport> reports,
                      std::span<const int> word_counts);

struct SpearmanResult {
  double rho = 0.0;
  int n = 0;
};

/// Average-rank (fractional) Spearman correlation.
/// Errors: LengthMismatch, TooFew (n < 2), ConstantInput (either rank vector
/// constant).
SpearmanResult spearman(std::span<const double> x, std::span<const double> y);

/// Fractional ranks (average over ties), 1-based.
std::vector<double> average_ranks(std::span<const double> values);

/// One row of a training trajectory; also the schema of the simulator CSV.
struct TrajectoryPoint {
  int step = 0;
  double mean_reward = 0.0;
  double mean_length = 0.0;
  double mean_hall = 0.0;
  double mean_miss = 0.0;
  double mean_ref_werr = 0.0;  // reference-side weighted errors
  double emit_logit = 0.0;
  double err_logit = 0.0;
  double hedge_logit = 0.0;
};

std::string trajectory_csv_header();
std::string trajectory_to_csv(const std::vector<TrajectoryPoint>& trajectory);
std::vector<TrajectoryPoint> trajectory_from_csv_file(const std::string& path);

/// Everything emit_report can render. At least one field must be set.
struct ReportInputs {
  std::optional<double> medc;
  std::optional<double> ambiguity_rate_pct;
  std::optional<SpearmanResult> spearman_hall;
  std::optional<SpearmanResult> spearman_miss;
  std::optional<DiagnosticAggregate> diagnostics;
  std::vector<TrajectoryPoint> trajectory;

  bool empty() const;
};

/// Writes report.json and report.csv, plus trend.svg when a trajectory is
/// present. Errors: EmptyInput when nothing was computed, IoFailure on write
/// failure. Returns the paths written.
std::vector<std::string> emit_report(const ReportInputs& inputs,
                                     const std::string& out_dir);

/// Three stacked panels over training steps: reward, response length,
/// reference-side weighted errors. Static markup, no script content.
std::string render_trend_svg(const std::vector<TrajectoryPoint>& trajectory);

}  // namespace claimdiff
