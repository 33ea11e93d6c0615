#pragma once

#include <future>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "demoflow/annotate.hpp"
#include "demoflow/errors.hpp"
#include "demoflow/events.hpp"
#include "demoflow/instructions.hpp"

namespace demoflow {

// One element of a multimodal prompt: either text or a screenshot.
struct PromptPart {
  enum class Kind { text, image };
  Kind kind = Kind::text;
  std::string text;
  Observation image;

  static PromptPart make_text(std::string t) {
    PromptPart p;
    p.kind = Kind::text;
    p.text = std::move(t);
    return p;
  }
  static PromptPart make_image(Observation o) {
    PromptPart p;
    p.kind = Kind::image;
    p.image = std::move(o);
    return p;
  }
};

// Pluggable text-generation backend (instruction generator, recovery
// planner). No model is bundled; implementations wrap an HTTP endpoint or a
// deterministic script.
class TextGenBackendInterface {
 public:
  virtual ~TextGenBackendInterface() = default;
  virtual std::string generate(const std::vector<PromptPart>& prompt) = 0;
  virtual std::string model_id() const { return "unspecified"; }
};

// Versioned prompt framing for instruction generation. Kept as a pinned text
// asset so a given toolkit version always sends the same prompt.
constexpr std::string_view kInstructionPromptVersion = "instruction-prompt/v1";
constexpr std::string_view kInstructionPromptSystem =
    "You are converting one recorded GUI action into a single imperative "
    "instruction. The first image is the screen before the action with the "
    "input location marked; the second image is the screen after the action. "
    "Describe the target's appearance and on-screen location, then state the "
    "expected outcome of the action (for example: \"; this action opens the "
    "settings dialog\"). Reply with the instruction text only.";

namespace detail {

inline std::string describe_event(const InputEvent& e, const DemoStep& step) {
  std::string d = std::string("event: ") + to_string(e.kind);
  if (e.position) d += " at " + to_string(*e.position);
  if (e.end_position) d += " to " + to_string(*e.end_position);
  if (e.kind == EventKind::scroll) d += " delta " + std::to_string(e.scroll_delta);
  d += "; before: " + step.obs_before.image_ref();
  d += "; after: " + step.obs_after.image_ref();
  return d;
}

}  // namespace detail

// Compiles one demo step into an instruction. Text and key steps are
// mechanical and never consult the backend; pointer steps send the
// click-annotated pre-image, the post-image, and the raw event description.
inline InstructionStep generate_step_instruction(const DemoStep& step,
                                                 TextGenBackendInterface& backend) {
  const InputEvent& e = step.event;
  if (e.kind == EventKind::text_burst)
    return make_instruction_step(make_type_action(e.text));
  if (e.kind == EventKind::key_press)
    return make_instruction_step(make_press_action(e.key));

  std::vector<PromptPart> prompt;
  prompt.push_back(PromptPart::make_text(std::string(kInstructionPromptVersion)));
  prompt.push_back(PromptPart::make_text(std::string(kInstructionPromptSystem)));
  Observation pre = step.obs_before;
  if (e.position) pre = annotate_click(pre, *e.position);
  prompt.push_back(PromptPart::make_image(std::move(pre)));
  prompt.push_back(PromptPart::make_image(step.obs_after));
  prompt.push_back(PromptPart::make_text(detail::describe_event(e, step)));

  std::string text = backend.generate(prompt);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos)
    throw Error(errc::validation, "backend returned empty instruction text");
  return make_instruction_step(std::move(text), e.position);
}

// All-or-nothing compilation of a demonstration, order-preserving. Step
// compilations are independent; `parallelism` bounds concurrent backend
// calls.
inline InstructionList generate_instructions(const Demonstration& demo,
                                             TextGenBackendInterface& backend,
                                             int parallelism = 1) {
  if (demo.steps.empty()) throw Error(errc::contract, "demonstration has no steps");
  InstructionList list;
  list.task_id = demo.session_id;
  list.steps.resize(demo.steps.size());

  auto compile_range = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      try {
        list.steps[i] = generate_step_instruction(demo.steps[i], backend);
      } catch (const Error& e) {
        throw Error(e.code(), "step " + std::to_string(i) + ": " + e.what());
      }
    }
  };

  if (parallelism <= 1 || demo.steps.size() < 2) {
    compile_range(0, demo.steps.size());
  } else {
    size_t workers = std::min<size_t>(parallelism, demo.steps.size());
    size_t chunk = (demo.steps.size() + workers - 1) / workers;
    std::vector<std::future<void>> futs;
    for (size_t w = 0; w < workers; ++w) {
      size_t begin = w * chunk;
      size_t end = std::min(begin + chunk, demo.steps.size());
      if (begin >= end) break;
      futs.push_back(std::async(std::launch::async, compile_range, begin, end));
    }
    for (auto& f : futs) f.get();  // first failure discards the whole list
  }
  return list;
}

struct LintFinding {
  enum class Code { missing_outcome, payload_mismatch, empty_text };
  Code code;
  std::string message;
};

// Heuristic effect-phrase markers; a pointer instruction should say what the
// action is expected to do, not just where to click.
inline bool has_outcome_clause(const std::string& text) {
  static const char* markers[] = {
      "this action", "this opens", "this button", "this is",   "which opens",
      "that opens",  "will open",  "clicking it", "to open",   "to close",
      "to display",  "to save",    "to show",     "; it",      "this closes",
  };
  for (const char* m : markers)
    if (text.find(m) != std::string::npos) return true;
  return false;
}

inline std::vector<LintFinding> validate_instruction(const InstructionStep& step) {
  std::vector<LintFinding> findings;
  if (step.action_text.empty()) {
    findings.push_back({LintFinding::Code::empty_text, "action text is empty"});
    return findings;
  }
  if (step.action_class == ActionClass::pointer && !has_outcome_clause(step.action_text)) {
    findings.push_back({LintFinding::Code::missing_outcome,
                        "pointer step lacks an expected-outcome clause"});
  }
  if (step.action_class == ActionClass::text_input) {
    std::string expected = extract_literal(step.action_text);
    if (!step.payload || *step.payload != expected) {
      findings.push_back({LintFinding::Code::payload_mismatch,
                          "payload disagrees with action text literal"});
    }
  }
  return findings;
}

}  // namespace demoflow
