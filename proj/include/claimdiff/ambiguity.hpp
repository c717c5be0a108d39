#pragma once

#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace claimdiff {

enum class PatternClass { EpistemicHedge, Approximator, Disjunction, NegatedCertainty };

std::string_view pattern_class_name(PatternClass cls);

struct PatternEntry {
  PatternClass cls;
  std::string pattern;  // ECMAScript regex; {lex} expands to the lexicon
};

/// Hedging-detector configuration: one free hedge per `tau` words, decay
/// coefficient `c`, and the ordered pattern set. The default set reconstructs
/// the four pattern classes (epistemic hedges, approximators, disjunctions
/// over visual claims, negated certainty) and ships as a versioned asset.
struct AmbiguityConfig {
  int tau = 90;
  double c = 0.1;
  std::vector<PatternEntry> patterns;
  /// Head nouns admitted into the disjunction lexicon alongside the built-in
  /// color words and numerals.
  std::vector<std::string> head_nouns;

  static AmbiguityConfig defaults();
  void validate() const;  // tau >= 1, c >= 0; Error(InvalidConfig)
};

struct AmbiguityMatch {
  PatternClass cls;
  std::string span;
  int word_offset = 0;  // 0-based index of the word where the match starts
};

struct AmbiguityReport {
  int n_amb = 0;
  int n_free = 0;
  int excess = 0;
  double factor = 1.0;  // exp(-c * excess)
  std::vector<AmbiguityMatch> matches;
};

/// Pattern set compiled once; detection is pure per caption and safe to call
/// concurrently.
class AmbiguityDetector {
 public:
  explicit AmbiguityDetector(AmbiguityConfig config);

  AmbiguityReport detect(std::string_view caption) const;
  const AmbiguityConfig& config() const { return config_; }

 private:
  AmbiguityConfig config_;
  std::vector<std::pair<PatternClass, std::regex>> compiled_;
};

/// One-shot convenience; compiles the pattern set per call.
AmbiguityReport detect_ambiguity(std::string_view caption,
                                 const AmbiguityConfig& config);

/// reward * report.factor.
double apply_penalty(double reward, const AmbiguityReport& report);

/// Unicode-whitespace-delimited word count; hyphenated tokens are one word.
int count_words(std::string_view text);

/// Parses "<class>: <regex>" lines ('#' comments and blanks skipped).
/// Classes: hedge | approx | disjunction | negated.
std::vector<PatternEntry> parse_pattern_lines(std::string_view text);
std::vector<PatternEntry> load_pattern_file(const std::string& path);

}  // namespace claimdiff
