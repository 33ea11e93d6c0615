#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "demoflow/backends/http.hpp"
#include "demoflow/errors.hpp"
#include "demoflow/orchestrator.hpp"

namespace demoflow {

enum class ToolkitMode { sim, real };

struct ToolkitConfig {
  ToolkitMode mode = ToolkitMode::sim;
  std::optional<EndpointConfig> instructor_endpoint;
  std::optional<EndpointConfig> grounder_endpoint;
  std::optional<EndpointConfig> judge_endpoint;
  std::optional<EndpointConfig> planner_endpoint;
  GrounderWire grounder_wire;
  RunConfig run;
  std::filesystem::path bundles_dir = "bundles";
  std::filesystem::path instructions_dir = "instructions";
  std::filesystem::path logs_dir = "logs";
};

// sim mode needs no endpoints; real mode requires all four.
inline void validate(const ToolkitConfig& c) {
  validate(c.run);
  if (c.mode == ToolkitMode::real) {
    if (!c.instructor_endpoint || !c.grounder_endpoint || !c.judge_endpoint ||
        !c.planner_endpoint)
      throw Error(errc::config, "real mode requires instructor, grounder, judge and planner endpoints");
  }
}

namespace detail {

inline EndpointConfig endpoint_from_json(const nlohmann::json& j) {
  EndpointConfig e;
  e.url = j.at("url").get<std::string>();
  e.credential_env = j.value("credential_env", "");
  e.timeout_ms = j.value("timeout_ms", 30000);
  e.model = j.value("model", "");
  return e;
}

}  // namespace detail

inline ToolkitConfig parse_toolkit_config(const std::string& bytes) {
  nlohmann::json j = nlohmann::json::parse(bytes, nullptr, false);
  if (j.is_discarded()) throw Error(errc::parse, "config is not valid JSON");
  ToolkitConfig c;
  std::string mode = j.value("mode", "sim");
  if (mode == "sim") c.mode = ToolkitMode::sim;
  else if (mode == "real") c.mode = ToolkitMode::real;
  else throw Error(errc::config, "mode must be \"sim\" or \"real\"");

  if (j.contains("backends")) {
    const auto& b = j["backends"];
    if (b.contains("instructor")) c.instructor_endpoint = detail::endpoint_from_json(b["instructor"]);
    if (b.contains("grounder")) c.grounder_endpoint = detail::endpoint_from_json(b["grounder"]);
    if (b.contains("judge")) c.judge_endpoint = detail::endpoint_from_json(b["judge"]);
    if (b.contains("planner")) c.planner_endpoint = detail::endpoint_from_json(b["planner"]);
    if (b.contains("grounder_wire")) {
      const auto& w = b["grounder_wire"];
      if (w.contains("request_template"))
        c.grounder_wire.request_template = w["request_template"].get<std::string>();
      if (w.contains("x_pointer")) c.grounder_wire.x_pointer = w["x_pointer"].get<std::string>();
      if (w.contains("y_pointer")) c.grounder_wire.y_pointer = w["y_pointer"].get<std::string>();
    }
  }
  if (j.contains("run")) {
    const auto& r = j["run"];
    c.run.max_step_retries = r.value("max_step_retries", c.run.max_step_retries);
    c.run.global_step_budget = r.value("global_step_budget", c.run.global_step_budget);
    c.run.settle_delay_ms = r.value("settle_delay_ms", c.run.settle_delay_ms);
    if (r.contains("recovery")) {
      c.run.recovery.max_recovery_attempts =
          r["recovery"].value("max_attempts", c.run.recovery.max_recovery_attempts);
      c.run.recovery.max_recovery_steps_per_attempt =
          r["recovery"].value("max_steps", c.run.recovery.max_recovery_steps_per_attempt);
    }
  }
  if (j.contains("paths")) {
    const auto& p = j["paths"];
    if (p.contains("bundles")) c.bundles_dir = p["bundles"].get<std::string>();
    if (p.contains("instructions")) c.instructions_dir = p["instructions"].get<std::string>();
    if (p.contains("logs")) c.logs_dir = p["logs"].get<std::string>();
  }
  validate(c);
  return c;
}

// Discovery order: explicit path > DEMOFLOW_CONFIG env var > ./toolkit-config.
// Credentials never live in the file, only in the environment.
inline ToolkitConfig load_toolkit_config(const std::filesystem::path& explicit_path = {}) {
  std::filesystem::path path = explicit_path;
  if (path.empty()) {
    if (const char* env = std::getenv("DEMOFLOW_CONFIG")) path = env;
  }
  if (path.empty() && std::filesystem::exists("toolkit-config")) path = "toolkit-config";
  if (path.empty()) return ToolkitConfig{};  // defaults: sim mode

  std::ifstream in(path);
  if (!in) throw Error(errc::config, "cannot read config: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_toolkit_config(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace demoflow
