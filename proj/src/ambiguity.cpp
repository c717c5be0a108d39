#include "claimdiff/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "claimdiff/errors.hpp"

namespace claimdiff {

namespace {
#include "prompt_assets.inc"

const char* const kColorWords[] = {
    "red",    "orange", "yellow",  "green", "blue",   "purple", "violet",
    "pink",   "brown",  "black",   "white", "gray",   "grey",   "beige",
    "tan",    "golden", "gold",    "silver", "maroon", "navy",  "teal",
    "cyan",   "magenta",
};

const char* const kSpelledNumerals[] = {
    "one",  "two",   "three", "four",  "five",  "six",    "seven",
    "eight", "nine", "ten",   "eleven", "twelve", "dozen", "twenty",
};

const char* const kDefaultHeadNouns[] = {
    "man",   "woman",  "person", "boy",   "girl",  "child",  "dog",
    "cat",   "bird",   "horse",  "car",   "truck", "bus",    "van",
    "bicycle", "motorcycle", "sign", "poster", "building", "house",
    "tree",  "flower", "table",  "chair", "bench", "bottle", "cup",
    "phone", "laptop", "book",   "hat",   "jacket", "shirt", "bag",
};

std::string build_lexicon_group(const std::vector<std::string>& head_nouns) {
  std::string group = "(?:";
  bool first = true;
  auto add = [&](std::string_view token) {
    if (!first) group += '|';
    first = false;
    group += token;
  };
  for (const char* w : kColorWords) add(w);
  for (const char* w : kSpelledNumerals) add(w);
  add("\\d+");
  for (const auto& w : head_nouns) add(w);
  group += ')';
  return group;
}

std::string expand_lexicon(const std::string& pattern, const std::string& lex) {
  std::string out;
  size_t pos = 0;
  while (true) {
    size_t hit = pattern.find("{lex}", pos);
    if (hit == std::string::npos) {
      out.append(pattern, pos, std::string::npos);
      return out;
    }
    out.append(pattern, pos, hit - pos);
    out += lex;
    pos = hit + 5;
  }
}

// Unicode whitespace code points beyond ASCII that split words.
bool is_unicode_space(char32_t cp) {
  switch (cp) {
    case 0x0085: case 0x00A0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return (cp >= 0x2000 && cp <= 0x200A);
  }
}

// Decodes the UTF-8 sequence at `i`; advances `i`. Invalid bytes are
// consumed one at a time and returned verbatim (never whitespace).
char32_t next_codepoint(std::string_view s, size_t& i) {
  const auto byte = [&](size_t k) { return static_cast<unsigned char>(s[k]); };
  unsigned char c = byte(i);
  if (c < 0x80) { ++i; return c; }
  int len = (c >= 0xF0) ? 4 : (c >= 0xE0) ? 3 : (c >= 0xC0) ? 2 : 1;
  if (len == 1 || i + len > s.size()) { ++i; return c; }
  char32_t cp = c & (0xFF >> (len + 1));
  for (int k = 1; k < len; ++k) {
    unsigned char cc = byte(i + k);
    if ((cc & 0xC0) != 0x80) { ++i; return c; }
    cp = (cp << 6) | (cc & 0x3F);
  }
  i += len;
  return cp;
}

bool is_space_at(std::string_view s, size_t& i) {
  char32_t cp = next_codepoint(s, i);
  if (cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\v' ||
      cp == U'\f')
    return true;
  return is_unicode_space(cp);
}

// Byte offsets of word starts under unicode-whitespace splitting.
std::vector<size_t> word_starts(std::string_view text) {
  std::vector<size_t> starts;
  bool in_word = false;
  size_t i = 0;
  while (i < text.size()) {
    size_t at = i;
    bool space = is_space_at(text, i);
    if (space) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      starts.push_back(at);
    }
  }
  return starts;
}

}  // namespace

std::string_view pattern_class_name(PatternClass cls) {
  switch (cls) {
    case PatternClass::EpistemicHedge: return "hedge";
    case PatternClass::Approximator: return "approx";
    case PatternClass::Disjunction: return "disjunction";
    case PatternClass::NegatedCertainty: return "negated";
  }
  return "unknown";
}

AmbiguityConfig AmbiguityConfig::defaults() {
  AmbiguityConfig config;
  config.patterns = parse_pattern_lines(kDefaultAmbiguityPatterns);
  config.head_nouns.assign(std::begin(kDefaultHeadNouns),
                           std::end(kDefaultHeadNouns));
  return config;
}

void AmbiguityConfig::validate() const {
  if (tau < 1)
    throw Error(ErrorCode::InvalidConfig, "ambiguity tau must be >= 1");
  if (!(c >= 0.0))
    throw Error(ErrorCode::InvalidConfig, "ambiguity coefficient must be >= 0");
}

AmbiguityDetector::AmbiguityDetector(AmbiguityConfig config)
    : config_(std::move(config)) {
  config_.validate();
  const std::string lex = build_lexicon_group(config_.head_nouns);
  compiled_.reserve(config_.patterns.size());
  for (const auto& entry : config_.patterns) {
    try {
      compiled_.emplace_back(
          entry.cls,
          std::regex(expand_lexicon(entry.pattern, lex),
                     std::regex::ECMAScript | std::regex::icase |
                         std::regex::optimize));
    } catch (const std::regex_error& e) {
      throw Error(ErrorCode::InvalidConfig,
                  "bad ambiguity pattern '" + entry.pattern + "': " + e.what());
    }
  }
}

AmbiguityReport AmbiguityDetector::detect(std::string_view caption) const {
  struct Span {
    size_t begin;
    size_t end;
    PatternClass cls;
  };
  std::vector<Span> spans;
  const char* base = caption.data();
  for (const auto& [cls, re] : compiled_) {
    auto it = std::cregex_iterator(base, base + caption.size(), re);
    for (auto end = std::cregex_iterator(); it != end; ++it) {
      const auto& m = *it;
      spans.push_back(Span{static_cast<size_t>(m.position(0)),
                           static_cast<size_t>(m.position(0) + m.length(0)),
                           cls});
    }
  }
  // Collapse overlapping and nested spans to a single match: earliest start
  // wins, longest span on ties.
  std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) {
    if (a.begin != b.begin) return a.begin < b.begin;
    return a.end > b.end;
  });
  const std::vector<size_t> starts = word_starts(caption);

  AmbiguityReport report;
  size_t covered_end = 0;
  bool any = false;
  for (const auto& span : spans) {
    if (any && span.begin < covered_end) continue;  // nested or overlapping
    any = true;
    covered_end = span.end;
    AmbiguityMatch match;
    match.cls = span.cls;
    match.span.assign(caption.substr(span.begin, span.end - span.begin));
    match.word_offset = static_cast<int>(
        std::upper_bound(starts.begin(), starts.end(), span.begin) -
        starts.begin() - 1);
    if (match.word_offset < 0) match.word_offset = 0;
    report.matches.push_back(std::move(match));
  }
  report.n_amb = static_cast<int>(report.matches.size());
  report.n_free = static_cast<int>(starts.size()) / config_.tau;
  report.excess = std::max(0, report.n_amb - report.n_free);
  report.factor = std::exp(-config_.c * report.excess);
  return report;
}

AmbiguityReport detect_ambiguity(std::string_view caption,
                                 const AmbiguityConfig& config) {
  return AmbiguityDetector(config).detect(caption);
}

double apply_penalty(double reward, const AmbiguityReport& report) {
  return reward * report.factor;
}

int count_words(std::string_view text) {
  return static_cast<int>(word_starts(text).size());
}

std::vector<PatternEntry> parse_pattern_lines(std::string_view text) {
  std::vector<PatternEntry> entries;
  size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    size_t nl = text.find('\n', start);
    std::string_view line = (nl == std::string_view::npos)
                                ? text.substr(start)
                                : text.substr(start, nl - start);
    ++line_no;
    start = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    size_t colon = line.find(':');
    if (colon == std::string_view::npos)
      throw Error(ErrorCode::InvalidConfig,
                  "pattern line " + std::to_string(line_no) +
                      " missing '<class>:' prefix");
    std::string_view cls_token = line.substr(0, colon);
    std::string_view pattern = line.substr(colon + 1);
    while (!pattern.empty() && pattern.front() == ' ') pattern.remove_prefix(1);
    PatternClass cls;
    if (cls_token == "hedge") cls = PatternClass::EpistemicHedge;
    else if (cls_token == "approx") cls = PatternClass::Approximator;
    else if (cls_token == "disjunction") cls = PatternClass::Disjunction;
    else if (cls_token == "negated") cls = PatternClass::NegatedCertainty;
    else
      throw Error(ErrorCode::InvalidConfig,
                  "unknown pattern class '" + std::string(cls_token) +
                      "' on line " + std::to_string(line_no));
    if (pattern.empty())
      throw Error(ErrorCode::InvalidConfig,
                  "empty pattern on line " + std::to_string(line_no));
    entries.push_back(PatternEntry{cls, std::string(pattern)});
  }
  return entries;
}

std::vector<PatternEntry> load_pattern_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::IoFailure, "cannot open pattern file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pattern_lines(buf.str());
}

}  // namespace claimdiff
