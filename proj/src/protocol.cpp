#include "claimdiff/protocol.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <sstream>

#include "claimdiff/errors.hpp"

namespace claimdiff {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\v' || c == '\f' || c == '\r';
}

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

bool ci_equal(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  }
  return true;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = nl + 1;
  }
  return lines;
}

// Matches "[DIFFERENCE <n>]" with case-insensitive name and tolerant spacing.
std::optional<int> match_difference_header(std::string_view line) {
  std::string_view s = trim(line);
  if (s.size() < 3 || s.front() != '[' || s.back() != ']') return std::nullopt;
  s = trim(s.substr(1, s.size() - 2));
  constexpr std::string_view kName = "DIFFERENCE";
  if (s.size() <= kName.size() || !ci_equal(s.substr(0, kName.size()), kName))
    return std::nullopt;
  std::string_view rest = trim(s.substr(kName.size()));
  if (rest.empty()) return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value);
  if (ec != std::errc() || ptr != rest.data() + rest.size()) return std::nullopt;
  return value;
}

bool match_winner_header(std::string_view line) {
  std::string_view s = trim(line);
  if (s.size() < 3 || s.front() != '[' || s.back() != ']') return false;
  return ci_equal(trim(s.substr(1, s.size() - 2)), "OVERALL_WINNER");
}

enum class Field {
  Aspect,
  ClaimA,
  ClaimB,
  Judgment,
  ErrorA,
  ErrorB,
  ErrorType,
  ErrorDetail,
  SeverityLevel,
};

struct FieldHit {
  Field field;
  std::string body;  // verbatim after trimming one leading space
};

const std::pair<std::string_view, Field> kFieldNames[] = {
    {"ASPECT", Field::Aspect},
    {"CAPTION_A_CLAIM", Field::ClaimA},
    {"CAPTION_B_CLAIM", Field::ClaimB},
    {"JUDGMENT", Field::Judgment},
    {"CAPTION_A_ERROR", Field::ErrorA},
    {"CAPTION_B_ERROR", Field::ErrorB},
    {"ERROR_TYPE", Field::ErrorType},
    {"ERROR_DETAIL", Field::ErrorDetail},
    {"SEVERITY_LEVEL", Field::SeverityLevel},
};

std::optional<FieldHit> match_field_header(std::string_view line) {
  size_t b = 0;
  while (b < line.size() && is_space(line[b])) ++b;
  for (const auto& [name, field] : kFieldNames) {
    if (line.size() - b < name.size()) continue;
    if (!ci_equal(line.substr(b, name.size()), name)) continue;
    size_t p = b + name.size();
    while (p < line.size() && is_space(line[p])) ++p;
    if (p >= line.size() || line[p] != ':') continue;
    ++p;
    if (p < line.size() && line[p] == ' ') ++p;  // trim one leading space
    return FieldHit{field, std::string(line.substr(p))};
  }
  return std::nullopt;
}

struct RawSide {
  bool seen = false;
  std::optional<std::string> type;
  std::optional<std::string> detail;
  std::optional<std::string> severity;
};

struct RawBlock {
  int index = 0;
  std::optional<std::string> aspect;
  std::optional<std::string> claim_a;
  std::optional<std::string> claim_b;
  std::optional<std::string> judgment;
  RawSide side_a;
  RawSide side_b;
  int current_side = 0;  // 0 none, 1 A, 2 B: most recent CAPTION_X_ERROR marker
};

[[noreturn]] void malformed(int index, const std::string& what) {
  throw Error(ErrorCode::MalformedDifferenceBlock,
              "[DIFFERENCE " + std::to_string(index) + "] " + what);
}

Judgment parse_judgment_token(std::string_view raw) {
  std::string_view t = trim(raw);
  if (ci_equal(t, "A")) return Judgment::A;
  if (ci_equal(t, "B")) return Judgment::B;
  if (ci_equal(t, "both_wrong")) return Judgment::BothWrong;
  if (ci_equal(t, "both_supported")) return Judgment::BothSupported;
  throw Error(ErrorCode::InvalidJudgment, "'" + std::string(t) + "'");
}

std::string normalize_error_type(std::string_view raw, int index,
                                 std::string_view side) {
  std::string_view t = trim(raw);
  if (t.empty())
    malformed(index, std::string(side) + " ERROR_TYPE is empty");
  std::string out;
  bool in_ws = false;
  for (char c : t) {
    if (is_space(c)) {
      in_ws = true;
      continue;
    }
    if (in_ws && !out.empty()) out.push_back('_');
    in_ws = false;
    out.push_back(c);
  }
  if (ci_equal(out, "NONE")) return "NONE";
  return out;
}

Severity parse_severity_token(std::string_view raw) {
  std::string_view t = trim(raw);
  if (ci_equal(t, "NA")) return Severity::NA;
  if (t == "1") return Severity::S1;
  if (t == "2") return Severity::S2;
  if (t == "3") return Severity::S3;
  throw Error(ErrorCode::InvalidSeverity, "'" + std::string(t) + "'");
}

SideError finalize_side(const RawSide& raw, int index, std::string_view side) {
  if (!raw.seen)
    malformed(index, "missing " + std::string(side) + " section");
  if (!raw.type)
    malformed(index, std::string(side) + " missing ERROR_TYPE");
  if (!raw.detail)
    malformed(index, std::string(side) + " missing ERROR_DETAIL");
  if (!raw.severity)
    malformed(index, std::string(side) + " missing SEVERITY_LEVEL");
  SideError err;
  err.type = normalize_error_type(*raw.type, index, side);
  err.detail = *raw.detail;
  err.severity = parse_severity_token(*raw.severity);
  // Severity/type coupling: NA if and only if type is NONE.
  if (err.is_none() && err.severity != Severity::NA)
    throw Error(ErrorCode::InvalidSeverity,
                "'" + std::string(trim(*raw.severity)) +
                    "' paired with ERROR_TYPE NONE in " + std::string(side));
  if (!err.is_none() && err.severity == Severity::NA)
    throw Error(ErrorCode::InvalidSeverity,
                "'NA' paired with non-NONE ERROR_TYPE '" + err.type +
                    "' in " + std::string(side));
  return err;
}

DifferenceRecord finalize_block(const RawBlock& raw) {
  if (!raw.aspect) malformed(raw.index, "missing ASPECT");
  if (!raw.claim_a) malformed(raw.index, "missing CAPTION_A_CLAIM");
  if (!raw.claim_b) malformed(raw.index, "missing CAPTION_B_CLAIM");
  if (!raw.judgment) malformed(raw.index, "missing JUDGMENT");

  DifferenceRecord rec;
  rec.index = raw.index;
  rec.aspect = *raw.aspect;
  rec.claim_a = *raw.claim_a;
  rec.claim_b = *raw.claim_b;
  rec.judgment = parse_judgment_token(*raw.judgment);
  rec.error_a = finalize_side(raw.side_a, raw.index, "CAPTION_A_ERROR");
  rec.error_b = finalize_side(raw.side_b, raw.index, "CAPTION_B_ERROR");

  switch (rec.judgment) {
    case Judgment::A:
      rec.consistency_warning = !rec.error_a.is_none();
      break;
    case Judgment::B:
      rec.consistency_warning = !rec.error_b.is_none();
      break;
    case Judgment::BothSupported:
      rec.consistency_warning =
          !rec.error_a.is_none() || !rec.error_b.is_none();
      break;
    case Judgment::BothWrong:
      break;
  }
  return rec;
}

}  // namespace

std::string_view judgment_token(Judgment j) {
  switch (j) {
    case Judgment::A: return "A";
    case Judgment::B: return "B";
    case Judgment::BothWrong: return "both_wrong";
    case Judgment::BothSupported: return "both_supported";
  }
  return "";
}

std::string_view winner_token(Winner w) {
  switch (w) {
    case Winner::A: return "A";
    case Winner::B: return "B";
    case Winner::Tie: return "Tie";
  }
  return "";
}

std::string_view severity_token(Severity s) {
  switch (s) {
    case Severity::S1: return "1";
    case Severity::S2: return "2";
    case Severity::S3: return "3";
    case Severity::NA: return "NA";
  }
  return "";
}

ClaimDiffTranscript parse_claimdiff(std::string_view text) {
  ClaimDiffTranscript out;
  out.raw.assign(text);

  enum class Phase { Preamble, Blocks, WinnerValue, Done };
  Phase phase = Phase::Preamble;

  std::optional<RawBlock> block;
  std::string* continuation = nullptr;  // free-text field accepting more lines
  bool winner_set = false;

  auto finish_block = [&] {
    if (block) {
      out.differences.push_back(finalize_block(*block));
      block.reset();
    }
    continuation = nullptr;
  };

  auto open_block = [&](int index) {
    finish_block();
    int expected = static_cast<int>(out.differences.size()) + 1;
    if (index != expected)
      throw Error(ErrorCode::NonContiguousIndices,
                  "expected [DIFFERENCE " + std::to_string(expected) +
                      "], got [DIFFERENCE " + std::to_string(index) + "]");
    block = RawBlock{};
    block->index = index;
    phase = Phase::Blocks;
  };

  for (std::string_view line : split_lines(text)) {
    if (phase == Phase::Done) break;

    if (phase == Phase::WinnerValue) {
      std::string_view token = trim(line);
      if (token.empty()) continue;
      if (ci_equal(token, "A")) out.overall_winner = Winner::A;
      else if (ci_equal(token, "B")) out.overall_winner = Winner::B;
      else if (ci_equal(token, "Tie")) out.overall_winner = Winner::Tie;
      else
        throw Error(ErrorCode::InvalidJudgment,
                    "winner '" + std::string(token) + "'");
      winner_set = true;
      phase = Phase::Done;
      continue;
    }

    if (auto index = match_difference_header(line)) {
      open_block(*index);
      continue;
    }
    if (match_winner_header(line)) {
      finish_block();
      phase = Phase::WinnerValue;
      continue;
    }

    if (phase == Phase::Preamble) continue;  // stray prose / fences skipped

    auto hit = match_field_header(line);
    if (!hit) {
      if (trim(line).empty()) {
        continuation = nullptr;  // blank line closes a free-text field
        continue;
      }
      if (continuation) {
        continuation->push_back('\n');
        continuation->append(line);
        continue;
      }
      malformed(block ? block->index : 0,
                "unexpected text '" + std::string(trim(line)) + "'");
    }

    if (!block) malformed(0, "field outside any difference block");
    continuation = nullptr;

    auto assign = [&](std::optional<std::string>& slot, const char* name,
                      bool free_text) {
      if (slot) malformed(block->index, std::string("duplicate ") + name);
      slot = std::move(hit->body);
      if (free_text) continuation = &*slot;
    };

    switch (hit->field) {
      case Field::Aspect: assign(block->aspect, "ASPECT", true); break;
      case Field::ClaimA: assign(block->claim_a, "CAPTION_A_CLAIM", true); break;
      case Field::ClaimB: assign(block->claim_b, "CAPTION_B_CLAIM", true); break;
      case Field::Judgment: assign(block->judgment, "JUDGMENT", false); break;
      case Field::ErrorA:
        if (block->side_a.seen) malformed(block->index, "duplicate CAPTION_A_ERROR");
        block->side_a.seen = true;
        block->current_side = 1;
        break;
      case Field::ErrorB:
        if (block->side_b.seen) malformed(block->index, "duplicate CAPTION_B_ERROR");
        block->side_b.seen = true;
        block->current_side = 2;
        break;
      case Field::ErrorType:
      case Field::ErrorDetail:
      case Field::SeverityLevel: {
        if (block->current_side == 0)
          malformed(block->index,
                    "error field before CAPTION_A_ERROR/CAPTION_B_ERROR");
        RawSide* side =
            block->current_side == 1 ? &block->side_a : &block->side_b;
        const char* side_name =
            block->current_side == 1 ? "CAPTION_A_ERROR" : "CAPTION_B_ERROR";
        if (hit->field == Field::ErrorType) {
          if (side->type) malformed(block->index, std::string(side_name) + " duplicate ERROR_TYPE");
          side->type = std::move(hit->body);
        } else if (hit->field == Field::ErrorDetail) {
          if (side->detail) malformed(block->index, std::string(side_name) + " duplicate ERROR_DETAIL");
          side->detail = std::move(hit->body);
          continuation = &*side->detail;
        } else {
          if (side->severity) malformed(block->index, std::string(side_name) + " duplicate SEVERITY_LEVEL");
          side->severity = std::move(hit->body);
        }
        break;
      }
    }
  }

  if (phase == Phase::Blocks && block) finish_block();
  if (!winner_set)
    throw Error(ErrorCode::MissingWinner, "no [OVERALL_WINNER] value found");
  return out;
}

std::string serialize_claimdiff(const ClaimDiffTranscript& transcript) {
  std::ostringstream out;
  auto emit_field = [&](const char* name, const std::string& body) {
    out << name << ':';
    if (!body.empty()) out << ' ' << body;
    out << '\n';
  };
  int index = 0;
  for (const auto& rec : transcript.differences) {
    ++index;
    out << "[DIFFERENCE " << index << "]\n";
    emit_field("ASPECT", rec.aspect);
    emit_field("CAPTION_A_CLAIM", rec.claim_a);
    emit_field("CAPTION_B_CLAIM", rec.claim_b);
    out << "JUDGMENT: " << judgment_token(rec.judgment) << "\n\n";
    for (const auto& [name, err] :
         {std::pair{"CAPTION_A_ERROR", &rec.error_a},
          std::pair{"CAPTION_B_ERROR", &rec.error_b}}) {
      out << name << ":\n";
      emit_field("ERROR_TYPE", err->type);
      emit_field("ERROR_DETAIL", err->detail);
      out << "SEVERITY_LEVEL: " << severity_token(err->severity) << "\n\n";
    }
  }
  out << "[OVERALL_WINNER]\n" << winner_token(transcript.overall_winner) << '\n';
  return out.str();
}

HolisticVerdict parse_holistic(std::string_view text) {
  std::optional<int> score;
  std::optional<std::string> rationale;
  for (std::string_view line : split_lines(text)) {
    size_t b = 0;
    while (b < line.size() && is_space(line[b])) ++b;
    auto try_header = [&](std::string_view name) -> std::optional<std::string_view> {
      if (line.size() - b < name.size()) return std::nullopt;
      if (!ci_equal(line.substr(b, name.size()), name)) return std::nullopt;
      size_t p = b + name.size();
      while (p < line.size() && is_space(line[p])) ++p;
      if (p >= line.size() || line[p] != ':') return std::nullopt;
      ++p;
      if (p < line.size() && line[p] == ' ') ++p;
      return line.substr(p);
    };
    if (!score) {
      if (auto body = try_header("SCORE")) {
        std::string_view t = trim(*body);
        int value = 0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
        if (ec != std::errc() || ptr != t.data() + t.size())
          throw Error(ErrorCode::MissingScore,
                      "SCORE line is not an integer: '" + std::string(t) + "'");
        if (value < 0 || value > 10)
          throw Error(ErrorCode::ScoreOutOfRange, std::to_string(value));
        score = value;
        continue;
      }
    }
    if (!rationale) {
      if (auto body = try_header("RATIONALE")) rationale = std::string(*body);
    }
  }
  if (!score) throw Error(ErrorCode::MissingScore, "no SCORE line found");
  if (!rationale)
    throw Error(ErrorCode::MissingRationale, "no RATIONALE line found");
  return HolisticVerdict{*score, std::move(*rationale)};
}

}  // namespace claimdiff
