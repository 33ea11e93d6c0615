#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "demoflow/events.hpp"
#include "demoflow/geometry.hpp"

namespace demoflow {

// An instruction resolved to a concrete action: kind plus target pixel point
// for pointer kinds, payload for text/key kinds.
struct GroundedCommand {
  EventKind kind = EventKind::left_click;
  std::optional<Point> target;
  std::optional<Point> drag_end;
  std::string payload;       // text literal or key token
  int scroll_delta = 0;
  int origin_step = -1;      // index into the instruction list

  bool operator==(const GroundedCommand&) const = default;
};

inline nlohmann::json command_to_json(const GroundedCommand& c) {
  nlohmann::json j;
  j["kind"] = to_string(c.kind);
  j["origin_step"] = c.origin_step;
  if (c.target) j["target"] = {c.target->x, c.target->y};
  if (c.drag_end) j["drag_end"] = {c.drag_end->x, c.drag_end->y};
  if (!c.payload.empty()) j["payload"] = c.payload;
  if (c.scroll_delta != 0) j["scroll_delta"] = c.scroll_delta;
  return j;
}

inline GroundedCommand command_from_json(const nlohmann::json& j) {
  GroundedCommand c;
  c.kind = event_kind_from_string(j.at("kind").get<std::string>());
  c.origin_step = j.at("origin_step").get<int>();
  if (j.contains("target")) c.target = Point{j["target"][0].get<int>(), j["target"][1].get<int>()};
  if (j.contains("drag_end")) c.drag_end = Point{j["drag_end"][0].get<int>(), j["drag_end"][1].get<int>()};
  if (j.contains("payload")) c.payload = j["payload"].get<std::string>();
  if (j.contains("scroll_delta")) c.scroll_delta = j["scroll_delta"].get<int>();
  return c;
}

}  // namespace demoflow
