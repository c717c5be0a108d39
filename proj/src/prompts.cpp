#include "claimdiff/prompts.hpp"

#include "claimdiff/errors.hpp"

namespace claimdiff {

namespace {
#include "prompt_assets.inc"
}  // namespace

std::string_view prompt_mode_name(PromptMode mode) {
  switch (mode) {
    case PromptMode::ClaimDiff: return "claimdiff";
    case PromptMode::HolisticWithRef: return "holistic-ref";
    case PromptMode::HolisticNoRef: return "holistic-noref";
    case PromptMode::DiagnosticWithRef: return "diagnostic-ref";
    case PromptMode::DiagnosticNoRef: return "diagnostic-noref";
    case PromptMode::CaptionGen: return "caption-gen";
  }
  return "unknown";
}

PromptMode parse_prompt_mode(std::string_view name) {
  if (name == "claimdiff") return PromptMode::ClaimDiff;
  if (name == "holistic-ref") return PromptMode::HolisticWithRef;
  if (name == "holistic-noref") return PromptMode::HolisticNoRef;
  if (name == "diagnostic-ref") return PromptMode::DiagnosticWithRef;
  if (name == "diagnostic-noref") return PromptMode::DiagnosticNoRef;
  if (name == "caption-gen") return PromptMode::CaptionGen;
  throw Error(ErrorCode::InvalidConfig,
              "unknown prompt mode '" + std::string(name) + "'");
}

std::string_view prompt_template(PromptMode mode) {
  switch (mode) {
    case PromptMode::ClaimDiff: return kPromptClaimDiff;
    case PromptMode::HolisticWithRef: return kPromptHolisticWithRef;
    case PromptMode::HolisticNoRef: return kPromptHolisticNoRef;
    case PromptMode::DiagnosticWithRef: return kPromptDiagnosticWithRef;
    case PromptMode::DiagnosticNoRef: return kPromptDiagnosticNoRef;
    case PromptMode::CaptionGen: return kPromptCaptionGen;
  }
  return {};
}

const std::vector<std::string>& prompt_slots(PromptMode mode) {
  static const std::vector<std::string> kClaimDiff{"caption_a", "caption_b"};
  static const std::vector<std::string> kHolRef{"actor_caption",
                                                "reference_caption"};
  static const std::vector<std::string> kHolNoRef{"actor_caption"};
  static const std::vector<std::string> kDiagRef{"gt_caption", "pred_caption"};
  static const std::vector<std::string> kDiagNoRef{"pred_caption"};
  static const std::vector<std::string> kNone{};
  switch (mode) {
    case PromptMode::ClaimDiff: return kClaimDiff;
    case PromptMode::HolisticWithRef: return kHolRef;
    case PromptMode::HolisticNoRef: return kHolNoRef;
    case PromptMode::DiagnosticWithRef: return kDiagRef;
    case PromptMode::DiagnosticNoRef: return kDiagNoRef;
    case PromptMode::CaptionGen: return kNone;
  }
  return kNone;
}

std::string render_prompt(PromptMode mode, const SlotMap& slots) {
  const auto& expected = prompt_slots(mode);
  for (const auto& [name, value] : slots) {
    (void)value;
    bool known = false;
    for (const auto& e : expected) {
      if (e == name) { known = true; break; }
    }
    if (!known) throw Error(ErrorCode::UnknownSlot, name);
  }
  std::string out(prompt_template(mode));
  for (const auto& name : expected) {
    auto it = slots.find(name);
    if (it == slots.end()) throw Error(ErrorCode::MissingSlot, name);
    const std::string token = "{" + name + "}";
    const auto pos = out.find(token);
    // Each placeholder appears exactly once in the stored templates.
    out.replace(pos, token.size(), it->second);
  }
  return out;
}

}  // namespace claimdiff
