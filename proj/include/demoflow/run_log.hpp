#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "demoflow/commands.hpp"
#include "demoflow/errors.hpp"
#include "demoflow/instructions.hpp"

namespace demoflow {

enum class VerifyMark { yes, no, skipped };

inline const char* to_string(VerifyMark v) {
  switch (v) {
    case VerifyMark::yes: return "yes";
    case VerifyMark::no: return "no";
    case VerifyMark::skipped: return "skipped";
  }
  return "?";
}

inline VerifyMark verify_mark_from_string(const std::string& s) {
  if (s == "yes") return VerifyMark::yes;
  if (s == "no") return VerifyMark::no;
  if (s == "skipped") return VerifyMark::skipped;
  throw Error(errc::schema, "unknown verification mark: " + s);
}

enum class RunOutcome { success, failed, budget_exhausted };

inline const char* to_string(RunOutcome o) {
  switch (o) {
    case RunOutcome::success: return "success";
    case RunOutcome::failed: return "failed";
    case RunOutcome::budget_exhausted: return "budget_exhausted";
  }
  return "?";
}

inline RunOutcome run_outcome_from_string(const std::string& s) {
  if (s == "success") return RunOutcome::success;
  if (s == "failed") return RunOutcome::failed;
  if (s == "budget_exhausted") return RunOutcome::budget_exhausted;
  throw Error(errc::schema, "unknown run outcome: " + s);
}

// Per-step execution trace entry. attempted_command is absent when grounding
// never produced a command for the step.
struct StepRecord {
  int step_index = 0;
  std::string action_text;
  std::optional<GroundedCommand> attempted_command;
  VerifyMark verification = VerifyMark::no;
  int retries_used = 0;
  int backtrack_attempts = 0;
  std::optional<std::string> failure_reason;
};

struct RunTotals {
  int steps_executed = 0;
  int model_calls = 0;
  int64_t wall_time_ms = 0;
};

constexpr int kRunLogFormatVersion = 1;

struct RunLog {
  int format_version = kRunLogFormatVersion;
  std::string task_id;
  std::vector<StepRecord> records;
  RunOutcome outcome = RunOutcome::failed;
  RunTotals totals;
  // Every command executed against the environment, in order (main attempts
  // and recovery actions); replaying it through a fresh environment with the
  // same seed reproduces the terminal state.
  std::vector<GroundedCommand> journal;
};

// outcome == success iff every record verified yes or was skipped.
inline bool run_log_consistent(const RunLog& log) {
  bool all_ok = true;
  for (const auto& r : log.records)
    if (r.verification == VerifyMark::no) all_ok = false;
  return (log.outcome == RunOutcome::success) == all_ok;
}

// Additional cross-check against the instruction list: verification is
// skipped exactly for text_input/key_press steps.
inline bool run_log_matches_instructions(const RunLog& log, const InstructionList& list) {
  for (const auto& r : log.records) {
    if (r.step_index < 0 || r.step_index >= static_cast<int>(list.steps.size())) return false;
    ActionClass cls = list.steps[r.step_index].action_class;
    bool non_visual = cls == ActionClass::text_input || cls == ActionClass::key_press;
    if ((r.verification == VerifyMark::skipped) != non_visual) return false;
  }
  return true;
}

inline nlohmann::json run_log_to_json(const RunLog& log) {
  nlohmann::json j;
  j["format_version"] = log.format_version;
  j["task_id"] = log.task_id;
  j["outcome"] = to_string(log.outcome);
  j["totals"] = {{"steps_executed", log.totals.steps_executed},
                 {"model_calls", log.totals.model_calls},
                 {"wall_time_ms", log.totals.wall_time_ms}};
  j["records"] = nlohmann::json::array();
  for (const auto& r : log.records) {
    nlohmann::json rj;
    rj["step_index"] = r.step_index;
    rj["action_text"] = r.action_text;
    if (r.attempted_command) rj["attempted_command"] = command_to_json(*r.attempted_command);
    else rj["attempted_command"] = "skipped-grounding";
    rj["verification"] = to_string(r.verification);
    rj["retries_used"] = r.retries_used;
    rj["backtrack_attempts"] = r.backtrack_attempts;
    if (r.failure_reason) rj["failure_reason"] = *r.failure_reason;
    j["records"].push_back(std::move(rj));
  }
  j["journal"] = nlohmann::json::array();
  for (const auto& c : log.journal) j["journal"].push_back(command_to_json(c));
  return j;
}

inline RunLog run_log_from_json(const nlohmann::json& j) {
  RunLog log;
  log.format_version = j.at("format_version").get<int>();
  if (log.format_version != kRunLogFormatVersion)
    throw Error(errc::schema, "unsupported run log format version");
  log.task_id = j.at("task_id").get<std::string>();
  log.outcome = run_outcome_from_string(j.at("outcome").get<std::string>());
  const auto& t = j.at("totals");
  log.totals.steps_executed = t.at("steps_executed").get<int>();
  log.totals.model_calls = t.at("model_calls").get<int>();
  log.totals.wall_time_ms = t.at("wall_time_ms").get<int64_t>();
  for (const auto& rj : j.at("records")) {
    StepRecord r;
    r.step_index = rj.at("step_index").get<int>();
    r.action_text = rj.at("action_text").get<std::string>();
    if (rj.at("attempted_command").is_object())
      r.attempted_command = command_from_json(rj["attempted_command"]);
    r.verification = verify_mark_from_string(rj.at("verification").get<std::string>());
    r.retries_used = rj.at("retries_used").get<int>();
    r.backtrack_attempts = rj.at("backtrack_attempts").get<int>();
    if (rj.contains("failure_reason")) r.failure_reason = rj["failure_reason"].get<std::string>();
    log.records.push_back(std::move(r));
  }
  for (const auto& cj : j.at("journal")) log.journal.push_back(command_from_json(cj));
  return log;
}

inline void save_run_log(const RunLog& log, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(errc::io, "cannot write run log: " + path.string());
  out << run_log_to_json(log).dump(2) << '\n';
}

inline RunLog load_run_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io, "cannot read run log: " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(errc::parse, "malformed run log JSON: " + path.string());
  return run_log_from_json(j);
}

}  // namespace demoflow
