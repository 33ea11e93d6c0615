#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "demoflow/errors.hpp"
#include "demoflow/executor.hpp"
#include "demoflow/grounder.hpp"
#include "demoflow/image.hpp"
#include "demoflow/instructions.hpp"
#include "demoflow/instructor.hpp"

namespace demoflow {

// Observation captured before a step's first attempt; the restoration target.
struct Checkpoint {
  int step_index = 0;
  Observation obs;
};

struct AttemptRecord {
  int attempt_number = 0;  // 1-based
  std::vector<GroundedCommand> commands;
  bool reached_target = false;
  std::string error_text;
};

// Append-only record of recovery attempts, fed back into the planner prompt
// so repeated attempts try something new.
class AttemptMemory {
 public:
  explicit AttemptMemory(size_t cap = 16) : cap_(cap) {}

  void append(AttemptRecord rec) {
    if (records_.size() >= cap_)
      throw Error(errc::validation, "attempt memory is full");
    records_.push_back(std::move(rec));
  }

  const std::vector<AttemptRecord>& records() const { return records_; }
  size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  std::string serialize() const {
    std::string out;
    for (const auto& r : records_) {
      out += "attempt " + std::to_string(r.attempt_number) + ": ";
      if (r.commands.empty()) out += "(no actions)";
      for (const auto& c : r.commands) {
        out += std::string(to_string(c.kind));
        if (c.target) out += " at " + to_string(*c.target);
        out += "; ";
      }
      out += r.reached_target ? "-> reached target" : "-> still diverged";
      if (!r.error_text.empty()) out += " [" + r.error_text + "]";
      out += '\n';
    }
    return out;
  }

 private:
  size_t cap_;
  std::vector<AttemptRecord> records_;
};

struct RecoveryConfig {
  int max_recovery_attempts = 3;
  int max_recovery_steps_per_attempt = 5;
};

inline void validate(const RecoveryConfig& c) {
  if (c.max_recovery_attempts < 1 || c.max_recovery_steps_per_attempt < 1)
    throw Error(errc::config, "recovery caps must be >= 1");
}

constexpr std::string_view kRecoveryPromptVersion = "recovery-prompt/v1";
constexpr std::string_view kRecoveryPromptSystem =
    "The first image shows the current screen; the second shows the state to "
    "return to. Plan a short sequence of actions that restores the second "
    "state (for example, closing a pop-up or navigating back). Output one "
    "JSON object per line of the form {\"action\": \"...\"}. Previous "
    "attempts, if any, are listed below; try a different approach if they "
    "failed.";

struct RecoveryPlan {
  std::vector<GroundedCommand> commands;
  std::optional<int> truncated_from;  // original length when capped
};

// Asks the planner for a recovery action sequence and grounds it on the
// current screen. The planner speaks the same JSON-lines action schema as
// instruction files, so parsing and grounding machinery is reused. An empty
// response is an empty plan. Returns no commands when current already
// matches the target.
inline RecoveryPlan plan_recovery(const Observation& current, const Checkpoint& target,
                                  const AttemptMemory& memory,
                                  TextGenBackendInterface& planner,
                                  GroundingInterface& grounder,
                                  int max_steps) {
  RecoveryPlan plan;
  if (current.digest == target.obs.digest) return plan;

  std::vector<PromptPart> prompt;
  prompt.push_back(PromptPart::make_text(std::string(kRecoveryPromptVersion)));
  prompt.push_back(PromptPart::make_text(std::string(kRecoveryPromptSystem)));
  prompt.push_back(PromptPart::make_image(current));
  prompt.push_back(PromptPart::make_image(target.obs));
  prompt.push_back(PromptPart::make_text(memory.empty() ? "no previous attempts"
                                                        : memory.serialize()));

  std::string text;
  try {
    text = planner.generate(prompt);
  } catch (const std::exception& e) {
    throw Error(errc::backend, std::string("recovery planner failed: ") + e.what());
  }
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return plan;

  InstructionList steps = parse_instruction_file(text, "recovery");
  if (static_cast<int>(steps.steps.size()) > max_steps)
    plan.truncated_from = static_cast<int>(steps.steps.size());
  for (size_t i = 0; i < steps.steps.size() && static_cast<int>(i) < max_steps; ++i) {
    const InstructionStep& s = steps.steps[i];
    std::optional<GroundedTarget> t;
    if (s.action_class == ActionClass::pointer) t = ground(s, current, grounder);
    plan.commands.push_back(to_command(s, target.step_index, t));
  }
  return plan;
}

enum class RecoveryOutcome { recovered, gave_up };

// How current and target observations are compared: digest equality in sim
// mode, a judge-backed comparison in real mode.
using StateMatcher = std::function<bool(const Observation& current, const Observation& target)>;

inline StateMatcher digest_matcher() {
  return [](const Observation& a, const Observation& b) { return a.digest == b.digest; };
}

// Executes one command and returns the resulting report. The orchestrator
// supplies a callback that also journals the command and charges the global
// budget.
using CommandExecutor = std::function<ExecutionReport(const GroundedCommand&)>;

inline CommandExecutor direct_executor(EnvironmentDriverInterface& driver) {
  return [&driver](const GroundedCommand& cmd) {
    std::vector<Primitive> script = compile_command(cmd);
    return execute(script, driver);
  };
}

// Bounded recovery loop: replan from the current screen each attempt,
// execute the plan one command at a time, and stop as soon as the
// environment matches the checkpoint again. Every attempt is recorded in the
// memory, including planner failures.
inline RecoveryOutcome run_recovery(EnvironmentDriverInterface& driver,
                                    const Checkpoint& target, const StateMatcher& match,
                                    const RecoveryConfig& config, AttemptMemory& memory,
                                    TextGenBackendInterface& planner,
                                    GroundingInterface& grounder,
                                    const CommandExecutor& exec_override = {}) {
  validate(config);
  CommandExecutor exec = exec_override ? exec_override : direct_executor(driver);

  Observation current = driver.capture();
  if (match(current, target.obs)) return RecoveryOutcome::recovered;

  for (int attempt = 1; attempt <= config.max_recovery_attempts; ++attempt) {
    AttemptRecord rec;
    rec.attempt_number = attempt;
    try {
      RecoveryPlan plan = plan_recovery(current, target, memory, planner, grounder,
                                        config.max_recovery_steps_per_attempt);
      if (plan.truncated_from)
        rec.error_text = "plan truncated from " + std::to_string(*plan.truncated_from) +
                         " to " + std::to_string(config.max_recovery_steps_per_attempt) +
                         " steps";
      for (const auto& cmd : plan.commands) {
        rec.commands.push_back(cmd);
        ExecutionReport report = exec(cmd);
        if (report.failed_primitive) {
          rec.error_text = "recovery command failed: " + report.failure_reason;
          break;
        }
        current = driver.capture();
        if (match(current, target.obs)) {
          rec.reached_target = true;
          break;
        }
      }
    } catch (const Error& e) {
      if (e.code() == errc::budget) throw;  // global budget is terminal
      rec.error_text = e.what();
    }
    memory.append(rec);
    if (rec.reached_target) return RecoveryOutcome::recovered;
    current = driver.capture();
  }
  return RecoveryOutcome::gave_up;
}

}  // namespace demoflow
