#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>

#include "demoflow/commands.hpp"
#include "demoflow/errors.hpp"
#include "demoflow/image.hpp"
#include "demoflow/instructions.hpp"

namespace demoflow {

struct GroundedTarget {
  Point point;
  std::string raw_response;  // opaque, for logging only
};

// Resolves a natural-language target description to pixel coordinates on the
// current screenshot, or reports that no target was found.
class GroundingInterface {
 public:
  virtual ~GroundingInterface() = default;
  virtual std::optional<GroundedTarget> locate(const std::string& instruction_text,
                                               const Observation& screenshot) = 0;
};

// Grounds a pointer instruction on the current screen. Out-of-bounds answers
// are rejected rather than clamped: a wrong-but-in-bounds click is
// recoverable, a silently clamped one hides grounding faults.
inline GroundedTarget ground(const InstructionStep& step, const Observation& obs,
                             GroundingInterface& grounder) {
  if (step.action_class != ActionClass::pointer)
    throw Error(errc::contract, "ground() requires a pointer step");
  std::optional<GroundedTarget> target = grounder.locate(step.action_text, obs);
  if (!target)
    throw Error(errc::grounding_miss, "no target found for: " + step.action_text);
  if (!Size{obs.width(), obs.height()}.contains(target->point))
    throw Error(errc::grounding_invalid,
                "grounder returned out-of-bounds point " + to_string(target->point));
  return *target;
}

namespace detail {

inline bool starts_with_ci(const std::string& text, const char* prefix) {
  size_t n = std::char_traits<char>::length(prefix);
  if (text.size() < n) return false;
  for (size_t i = 0; i < n; ++i)
    if (std::tolower(static_cast<unsigned char>(text[i])) != prefix[i]) return false;
  return true;
}

}  // namespace detail

// Derives the command kind from the instruction's class and leading verb
// phrase; pointer default is a left click.
inline GroundedCommand to_command(const InstructionStep& step, int step_index,
                                  const std::optional<GroundedTarget>& target) {
  GroundedCommand cmd;
  cmd.origin_step = step_index;
  switch (step.action_class) {
    case ActionClass::text_input:
      cmd.kind = EventKind::text_burst;
      cmd.payload = step.payload.value_or("");
      return cmd;
    case ActionClass::key_press:
      cmd.kind = EventKind::key_press;
      cmd.payload = step.payload.value_or("");
      return cmd;
    case ActionClass::pointer:
      break;
  }
  if (!target) throw Error(errc::contract, "pointer step has no grounded target");
  cmd.target = target->point;
  const std::string& text = step.action_text;
  if (detail::starts_with_ci(text, "right click") || detail::starts_with_ci(text, "right-click")) {
    cmd.kind = EventKind::right_click;
  } else if (detail::starts_with_ci(text, "double click") ||
             detail::starts_with_ci(text, "double-click")) {
    cmd.kind = EventKind::double_click;
  } else if (detail::starts_with_ci(text, "scroll")) {
    cmd.kind = EventKind::scroll;
    cmd.scroll_delta = detail::starts_with_ci(text, "scroll up") ? -3 : 3;
  } else {
    cmd.kind = EventKind::left_click;
  }
  return cmd;
}

}  // namespace demoflow
