#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "demoflow/errors.hpp"
#include "demoflow/geometry.hpp"

namespace demoflow {

enum class ActionClass { pointer, text_input, key_press };

inline const char* to_string(ActionClass c) {
  switch (c) {
    case ActionClass::pointer: return "pointer";
    case ActionClass::text_input: return "text_input";
    case ActionClass::key_press: return "key_press";
  }
  return "?";
}

// "TYPE "/"PRESS " prefixes are case-sensitive canonical verbs; anything else
// is a pointer action.
inline ActionClass classify_action(std::string_view action_text) {
  if (action_text.starts_with("TYPE ")) return ActionClass::text_input;
  if (action_text.starts_with("PRESS ")) return ActionClass::key_press;
  return ActionClass::pointer;
}

// Extracts the quoted literal from "TYPE '<text>'" / "PRESS '<key>'".
// Unquoted remainders are accepted as-is.
inline std::string extract_literal(std::string_view action_text) {
  size_t sp = action_text.find(' ');
  std::string_view rest = action_text.substr(sp == std::string_view::npos ? action_text.size() : sp + 1);
  if (rest.size() >= 2 && rest.front() == '\'' && rest.back() == '\'')
    return std::string(rest.substr(1, rest.size() - 2));
  return std::string(rest);
}

inline std::string make_type_action(std::string_view payload) {
  return "TYPE '" + std::string(payload) + "'";
}

inline std::string make_press_action(std::string_view key) {
  return "PRESS '" + std::string(key) + "'";
}

struct InstructionStep {
  std::string action_text;
  ActionClass action_class = ActionClass::pointer;
  std::optional<Point> source_point;   // demo hint, never authoritative
  std::optional<std::string> payload;  // literal text / key token

  bool operator==(const InstructionStep&) const = default;
};

// Builds a step from its action text, deriving class and payload.
inline InstructionStep make_instruction_step(std::string text,
                                             std::optional<Point> source_point = std::nullopt) {
  if (text.empty()) throw Error(errc::validation, "instruction action_text is empty");
  InstructionStep s;
  s.action_class = classify_action(text);
  if (s.action_class != ActionClass::pointer) s.payload = extract_literal(text);
  s.action_text = std::move(text);
  s.source_point = source_point;
  return s;
}

struct InstructionList {
  std::string task_id;
  std::vector<InstructionStep> steps;

  bool operator==(const InstructionList&) const = default;
};

// One {"action": "<text>"} JSON object per non-empty line.
inline InstructionList parse_instruction_file(std::string_view bytes,
                                              std::string task_id = "") {
  InstructionList list;
  list.task_id = std::move(task_id);
  size_t pos = 0;
  int line_no = 0;
  while (pos <= bytes.size()) {
    size_t eol = bytes.find('\n', pos);
    std::string_view line = bytes.substr(pos, eol == std::string_view::npos ? bytes.size() - pos
                                                                            : eol - pos);
    pos = (eol == std::string_view::npos) ? bytes.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw Error(errc::parse, "malformed JSON at line " + std::to_string(line_no));
    if (!j.is_object() || !j.contains("action") || !j["action"].is_string())
      throw Error(errc::schema, "line " + std::to_string(line_no) + ": expected an object with key \"action\"");
    std::string text = j["action"].get<std::string>();
    if (text.empty())
      throw Error(errc::schema, "line " + std::to_string(line_no) + ": empty action text");
    list.steps.push_back(make_instruction_step(std::move(text)));
  }
  if (list.steps.empty()) throw Error(errc::validation, "instruction file has no steps");
  return list;
}

// Canonical form: {"action": <json string>} per line, "action" first, a single
// space after the colon, newline-terminated. Parsing then serializing
// canonical input is byte-identical.
inline std::string serialize_instruction_line(const InstructionStep& step) {
  nlohmann::json text = step.action_text;
  return "{\"action\": " + text.dump() + "}";
}

inline std::string serialize_instruction_file(const InstructionList& list) {
  std::string out;
  for (const auto& s : list.steps) {
    out += serialize_instruction_line(s);
    out += '\n';
  }
  return out;
}

}  // namespace demoflow
