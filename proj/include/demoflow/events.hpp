#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "demoflow/errors.hpp"
#include "demoflow/geometry.hpp"
#include "demoflow/image.hpp"

namespace demoflow {

enum class EventKind {
  left_click,
  right_click,
  double_click,
  drag,
  key_press,
  text_burst,
  scroll,
};

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::left_click: return "left_click";
    case EventKind::right_click: return "right_click";
    case EventKind::double_click: return "double_click";
    case EventKind::drag: return "drag";
    case EventKind::key_press: return "key_press";
    case EventKind::text_burst: return "text_burst";
    case EventKind::scroll: return "scroll";
  }
  return "?";
}

inline EventKind event_kind_from_string(const std::string& s) {
  if (s == "left_click") return EventKind::left_click;
  if (s == "right_click") return EventKind::right_click;
  if (s == "double_click") return EventKind::double_click;
  if (s == "drag") return EventKind::drag;
  if (s == "key_press") return EventKind::key_press;
  if (s == "text_burst") return EventKind::text_burst;
  if (s == "scroll") return EventKind::scroll;
  throw Error(errc::schema, "unknown event kind: " + s);
}

// Pointer kinds must carry an on-screen position; scroll may, text/key never do.
inline bool is_pointer_kind(EventKind k) {
  return k == EventKind::left_click || k == EventKind::right_click ||
         k == EventKind::double_click || k == EventKind::drag;
}

// One coalesced user/agent input primitive.
struct InputEvent {
  EventKind kind = EventKind::left_click;
  std::optional<Point> position;       // pointer kinds (and optionally scroll)
  std::optional<Point> end_position;   // drag only
  std::string key;                     // key_press only (named key token)
  std::string text;                    // text_burst only
  int scroll_delta = 0;                // signed lines, positive scrolls down
  int64_t timestamp_ms = 0;

  bool operator==(const InputEvent&) const = default;
};

inline void validate_event(const InputEvent& e, Size screen) {
  if (e.timestamp_ms < 0) throw Error(errc::validation, "event timestamp is negative");
  if (is_pointer_kind(e.kind)) {
    if (!e.position) throw Error(errc::validation, "pointer event lacks a position");
    if (!screen.contains(*e.position))
      throw Error(errc::validation, "event position outside screen bounds");
    if (e.kind == EventKind::drag) {
      if (!e.end_position) throw Error(errc::validation, "drag lacks an end position");
      if (!screen.contains(*e.end_position))
        throw Error(errc::validation, "drag end position outside screen bounds");
    }
  } else if (e.kind != EventKind::scroll && e.position) {
    throw Error(errc::validation, "non-pointer event carries a position");
  }
  if (e.kind == EventKind::key_press && e.key.empty())
    throw Error(errc::validation, "key_press lacks a key token");
}

inline nlohmann::json event_to_json(const InputEvent& e) {
  nlohmann::json j;
  j["kind"] = to_string(e.kind);
  j["ts"] = e.timestamp_ms;
  if (e.position) j["pos"] = {e.position->x, e.position->y};
  if (e.end_position) j["end"] = {e.end_position->x, e.end_position->y};
  if (!e.key.empty()) j["key"] = e.key;
  if (!e.text.empty()) j["text"] = e.text;
  if (e.scroll_delta != 0) j["scroll"] = e.scroll_delta;
  return j;
}

inline InputEvent event_from_json(const nlohmann::json& j) {
  InputEvent e;
  e.kind = event_kind_from_string(j.at("kind").get<std::string>());
  e.timestamp_ms = j.at("ts").get<int64_t>();
  if (j.contains("pos")) e.position = Point{j["pos"][0].get<int>(), j["pos"][1].get<int>()};
  if (j.contains("end")) e.end_position = Point{j["end"][0].get<int>(), j["end"][1].get<int>()};
  if (j.contains("key")) e.key = j["key"].get<std::string>();
  if (j.contains("text")) e.text = j["text"].get<std::string>();
  if (j.contains("scroll")) e.scroll_delta = j["scroll"].get<int>();
  return e;
}

// (screenshot-before, action, screenshot-after) triple.
struct DemoStep {
  Observation obs_before;
  InputEvent event;
  Observation obs_after;
};

inline void validate_step(const DemoStep& s) {
  if (!(s.obs_before.timestamp_ms <= s.event.timestamp_ms &&
        s.event.timestamp_ms < s.obs_after.timestamp_ms))
    throw Error(errc::validation, "step violates obs_before.ts <= event.ts < obs_after.ts");
}

struct Demonstration {
  std::vector<DemoStep> steps;
  Size screen_size;
  std::string session_id;
};

inline void validate_demonstration(const Demonstration& d) {
  int64_t prev = -1;
  for (const auto& s : d.steps) {
    validate_step(s);
    if (s.obs_before.image && s.obs_before.image->size() != d.screen_size)
      throw Error(errc::validation, "observation size differs from demonstration screen size");
    if (s.obs_after.image && s.obs_after.image->size() != d.screen_size)
      throw Error(errc::validation, "observation size differs from demonstration screen size");
    if (s.event.timestamp_ms <= prev)
      throw Error(errc::validation, "step timestamps must strictly increase");
    prev = s.event.timestamp_ms;
  }
}

}  // namespace demoflow
