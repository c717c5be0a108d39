#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace claimdiff {

/// Judge prompt families. Templates are versioned text assets compiled into
/// the library; `dump-prompt` in the CLI emits them for audit.
enum class PromptMode {
  ClaimDiff,
  HolisticWithRef,
  HolisticNoRef,
  DiagnosticWithRef,
  DiagnosticNoRef,
  CaptionGen,
};

using SlotMap = std::map<std::string, std::string>;

std::string_view prompt_mode_name(PromptMode mode);

/// Parses a mode name as used on the CLI ("claimdiff", "holistic-ref",
/// "holistic-noref", "diagnostic-ref", "diagnostic-noref", "caption-gen").
/// Throws Error(InvalidConfig) for unknown names.
PromptMode parse_prompt_mode(std::string_view name);

/// Raw template text for a mode, with its placeholder slots unfilled.
std::string_view prompt_template(PromptMode mode);

/// Placeholder names the mode's template expects, e.g. {"caption_a",
/// "caption_b"} for ClaimDiff. CaptionGen has none.
const std::vector<std::string>& prompt_slots(PromptMode mode);

/// Substitutes every placeholder of the mode exactly once.
/// Throws Error(MissingSlot) when a required slot is absent and
/// Error(UnknownSlot) when an extra slot is supplied.
std::string render_prompt(PromptMode mode, const SlotMap& slots);

}  // namespace claimdiff
