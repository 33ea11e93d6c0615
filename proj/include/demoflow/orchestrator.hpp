#pragma once

#include <chrono>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "demoflow/backtracker.hpp"
#include "demoflow/errors.hpp"
#include "demoflow/executor.hpp"
#include "demoflow/grounder.hpp"
#include "demoflow/instructions.hpp"
#include "demoflow/run_log.hpp"
#include "demoflow/sim/state.hpp"
#include "demoflow/verifier.hpp"

namespace demoflow {

struct RunConfig {
  int max_step_retries = 2;      // attempts per step = 1 + retries
  RecoveryConfig recovery;
  int global_step_budget = 100;  // executed commands, recovery included
  int64_t settle_delay_ms = 300;
  bool verifier_enabled = true;
  bool backtracker_enabled = true;
  std::string task_id;
};

inline void validate(const RunConfig& c) {
  if (c.max_step_retries < 0) throw Error(errc::config, "max_step_retries must be >= 0");
  if (c.global_step_budget < 1) throw Error(errc::config, "global_step_budget must be >= 1");
  validate(c.recovery);
}

struct Backends {
  GroundingInterface* grounding = nullptr;
  JudgeInterface* judge = nullptr;
  TextGenBackendInterface* planner = nullptr;
};

struct RunResult {
  RunOutcome outcome = RunOutcome::failed;
  RunLog log;
};

namespace detail {

struct BudgetExhausted {};

// Central bookkeeping for everything executed against the environment:
// journal, budget, and primitive accounting.
class ExecContext {
 public:
  ExecContext(EnvironmentDriverInterface& driver, RunLog& log, int budget)
      : driver_(driver), log_(log), budget_(budget) {}

  ExecutionReport run(const GroundedCommand& cmd) {
    if (executed_ >= budget_) throw Error(errc::budget, "global step budget exhausted");
    ++executed_;
    log_.journal.push_back(cmd);
    std::vector<Primitive> script = compile_command(cmd);
    return execute(script, driver_);
  }

  int executed() const { return executed_; }

 private:
  EnvironmentDriverInterface& driver_;
  RunLog& log_;
  int budget_;
  int executed_ = 0;
};

}  // namespace detail

// The actor loop: ground, execute, verify, and on failure recover and retry,
// under per-step and global budgets. Backend failures become step failures,
// never crashes.
inline RunResult run_task(const InstructionList& instructions,
                          EnvironmentDriverInterface& driver, const Backends& backends,
                          const RunConfig& config) {
  validate(config);
  if (instructions.steps.empty()) throw Error(errc::contract, "instruction list is empty");
  if (!backends.grounding) throw Error(errc::config, "grounding backend is required");
  if (config.verifier_enabled && !backends.judge)
    throw Error(errc::config, "judge backend is required unless the verifier is disabled");

  auto started = std::chrono::steady_clock::now();
  RunResult result;
  RunLog& log = result.log;
  log.task_id = config.task_id.empty() ? instructions.task_id : config.task_id;

  int model_calls = 0;
  detail::ExecContext exec(driver, log, config.global_step_budget);
  CommandExecutor exec_cb = [&exec](const GroundedCommand& c) { return exec.run(c); };

  bool all_ok = true;
  RunOutcome outcome = RunOutcome::success;

  for (size_t i = 0; i < instructions.steps.size() && all_ok; ++i) {
    const InstructionStep& step = instructions.steps[i];
    StepRecord rec;
    rec.step_index = static_cast<int>(i);
    rec.action_text = step.action_text;

    Checkpoint checkpoint{static_cast<int>(i), driver.capture()};
    AttemptMemory memory(static_cast<size_t>(config.max_step_retries + 1) *
                             config.recovery.max_recovery_attempts +
                         1);

    bool step_ok = false;
    std::string last_failure;
    try {
      for (int attempt = 0; attempt <= config.max_step_retries; ++attempt) {
        if (attempt > 0) rec.retries_used = attempt;
        Observation before = attempt == 0 ? checkpoint.obs : driver.capture();
        try {
          std::optional<GroundedTarget> target;
          if (step.action_class == ActionClass::pointer) {
            ++model_calls;
            target = ground(step, before, *backends.grounding);
          }
          GroundedCommand cmd = to_command(step, static_cast<int>(i), target);
          rec.attempted_command = cmd;

          ExecutionReport report = exec.run(cmd);
          if (report.failed_primitive)
            throw Error(errc::backend, "execution failed: " + report.failure_reason);

          driver.settle(config.settle_delay_ms);
          Observation after = driver.capture();

          if (!should_verify(step)) {
            rec.verification = VerifyMark::skipped;
            step_ok = true;
            break;
          }
          if (!config.verifier_enabled) {
            rec.verification = VerifyMark::yes;  // assumed; ablation condition
            step_ok = true;
            break;
          }
          ++model_calls;
          Verdict verdict;
          try {
            verdict = verify(step, before, after, *backends.judge);
          } catch (const Error& e) {
            if (e.code() != errc::backend) throw;
            // Unavailable verification fails safe into the recovery path.
            verdict = Verdict{VerifyMark::no, e.what()};
          }
          if (verdict.mark == VerifyMark::yes) {
            rec.verification = VerifyMark::yes;
            step_ok = true;
            break;
          }
          last_failure = "verification: no";
          if (!verdict.rationale.empty()) last_failure += " (" + verdict.rationale + ")";
        } catch (const Error& e) {
          if (e.code() == errc::budget) throw;
          last_failure = std::string(errc_name(e.code())) + ": " + e.what();
        }

        if (attempt == config.max_step_retries) break;  // retries exhausted

        if (config.backtracker_enabled && backends.planner) {
          ++model_calls;
          size_t before_mem = memory.size();
          RecoveryOutcome rc =
              run_recovery(driver, checkpoint, digest_matcher(), config.recovery, memory,
                           *backends.planner, *backends.grounding, exec_cb);
          rec.backtrack_attempts += static_cast<int>(memory.size() - before_mem);
          if (rc == RecoveryOutcome::gave_up) {
            last_failure += "; recovery gave up after " +
                            std::to_string(config.recovery.max_recovery_attempts) +
                            " attempts";
            break;  // terminal for the step
          }
        }
      }
    } catch (const Error& e) {
      if (e.code() != errc::budget) throw;
      rec.verification = VerifyMark::no;
      rec.failure_reason = e.what();
      log.records.push_back(rec);
      outcome = RunOutcome::budget_exhausted;
      all_ok = false;
      break;
    }

    if (!step_ok) {
      rec.verification = VerifyMark::no;
      rec.failure_reason = last_failure.empty() ? "step failed" : last_failure;
      outcome = RunOutcome::failed;
      all_ok = false;
    }
    log.records.push_back(rec);
  }

  log.outcome = all_ok ? RunOutcome::success : outcome;
  log.totals.steps_executed = static_cast<int>(log.records.size());
  log.totals.model_calls = model_calls;
  log.totals.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - started)
                                .count();
  result.outcome = log.outcome;
  return result;
}

// Human-readable trace in the runner's log format: one block per step, a
// verification line per verified step, and a terminal line on success.
inline std::string emit_trace(const RunLog& log) {
  if (log.records.empty()) throw Error(errc::contract, "run log has no records");
  std::ostringstream out;
  for (const auto& rec : log.records) {
    out << "Executing step " << rec.step_index << ":\n";
    out << "Action: " << rec.action_text << "\n";
    switch (rec.verification) {
      case VerifyMark::yes:
        out << "Verification Response: YES\n";
        break;
      case VerifyMark::no:
        out << "Verification Response: NO\n";
        if (rec.failure_reason) out << "Step failed: " << *rec.failure_reason << "\n";
        break;
      case VerifyMark::skipped:
        out << "(No need to verify text input or key press)\n";
        break;
    }
    out << "\n";
  }
  switch (log.outcome) {
    case RunOutcome::success:
      out << "All steps completed successfully.\n";
      break;
    case RunOutcome::failed:
      out << "Task failed.\n";
      break;
    case RunOutcome::budget_exhausted:
      out << "Global step budget exhausted.\n";
      break;
  }
  return out.str();
}

// Task-level reward: the world's declared goal predicate over the terminal
// state, independent of step-level verdicts.
inline bool evaluate_task(const sim::SimState& final_state, const sim::WorldSpec& world) {
  return sim::check_goal(world, final_state);
}

}  // namespace demoflow
