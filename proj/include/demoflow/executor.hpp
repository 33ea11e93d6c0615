#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "demoflow/commands.hpp"
#include "demoflow/errors.hpp"
#include "demoflow/geometry.hpp"
#include "demoflow/image.hpp"

namespace demoflow {

enum class MouseButton { left, right };

namespace prim {
struct MoveTo { Point p; bool operator==(const MoveTo&) const = default; };
struct ButtonDown { MouseButton b = MouseButton::left; bool operator==(const ButtonDown&) const = default; };
struct ButtonUp { MouseButton b = MouseButton::left; bool operator==(const ButtonUp&) const = default; };
struct Click { Point p; MouseButton b = MouseButton::left; int count = 1; bool operator==(const Click&) const = default; };
struct KeyDown { std::string key; bool operator==(const KeyDown&) const = default; };
struct KeyUp { std::string key; bool operator==(const KeyUp&) const = default; };
struct TypeText { std::string text; bool operator==(const TypeText&) const = default; };
struct Scroll { int delta = 0; bool operator==(const Scroll&) const = default; };
struct Wait { int64_t ms = 0; bool operator==(const Wait&) const = default; };
}  // namespace prim

using Primitive = std::variant<prim::MoveTo, prim::ButtonDown, prim::ButtonUp, prim::Click,
                               prim::KeyDown, prim::KeyUp, prim::TypeText, prim::Scroll,
                               prim::Wait>;

constexpr int64_t kMaxWaitMs = 5000;

// Upper bound on the script length any single command can compile to.
constexpr int kMaxPrimitivesPerCommand = 4;

inline void validate_primitive(const Primitive& p) {
  if (const auto* w = std::get_if<prim::Wait>(&p)) {
    if (w->ms < 0 || w->ms > kMaxWaitMs)
      throw Error(errc::validation, "wait outside [0, 5000] ms");
  }
}

// Abstract environment: applies primitives and captures screenshots. apply
// throws on driver-level failure; capture reflects all applied primitives.
class EnvironmentDriverInterface {
 public:
  virtual ~EnvironmentDriverInterface() = default;
  virtual void apply(const Primitive& p) = 0;
  virtual Observation capture() = 0;
  virtual Size screen_size() const = 0;
  // Pacing hook between an action and its post-action capture; instantaneous
  // environments ignore it.
  virtual void settle(int64_t /*ms*/) {}
};

struct ExecutionReport {
  int primitives_applied = 0;
  std::optional<int> failed_primitive;
  std::string failure_reason;
  int64_t duration_ms = 0;
};

// Deterministic expansion of a grounded command into driver primitives.
inline std::vector<Primitive> compile_command(const GroundedCommand& cmd) {
  std::vector<Primitive> script;
  switch (cmd.kind) {
    case EventKind::left_click:
    case EventKind::right_click: {
      if (!cmd.target) throw Error(errc::contract, "click command lacks a target");
      MouseButton b = cmd.kind == EventKind::right_click ? MouseButton::right : MouseButton::left;
      script.push_back(prim::MoveTo{*cmd.target});
      script.push_back(prim::Click{*cmd.target, b, 1});
      break;
    }
    case EventKind::double_click: {
      if (!cmd.target) throw Error(errc::contract, "double click command lacks a target");
      script.push_back(prim::MoveTo{*cmd.target});
      script.push_back(prim::Click{*cmd.target, MouseButton::left, 2});
      break;
    }
    case EventKind::drag: {
      if (!cmd.target || !cmd.drag_end)
        throw Error(errc::contract, "drag command lacks start or end point");
      script.push_back(prim::MoveTo{*cmd.target});
      script.push_back(prim::ButtonDown{MouseButton::left});
      script.push_back(prim::MoveTo{*cmd.drag_end});
      script.push_back(prim::ButtonUp{MouseButton::left});
      break;
    }
    case EventKind::text_burst:
      script.push_back(prim::TypeText{cmd.payload});
      break;
    case EventKind::key_press:
      if (cmd.payload.empty()) throw Error(errc::contract, "key press command lacks a key");
      script.push_back(prim::KeyDown{cmd.payload});
      script.push_back(prim::KeyUp{cmd.payload});
      break;
    case EventKind::scroll:
      if (cmd.target) script.push_back(prim::MoveTo{*cmd.target});
      script.push_back(prim::Scroll{cmd.scroll_delta});
      break;
    default:
      throw Error(errc::contract, "unsupported command kind");
  }
  return script;
}

// Applies the script in order, stopping at the first driver failure.
inline ExecutionReport execute(std::span<const Primitive> script,
                               EnvironmentDriverInterface& driver) {
  ExecutionReport report;
  auto start = std::chrono::steady_clock::now();
  for (size_t i = 0; i < script.size(); ++i) {
    try {
      validate_primitive(script[i]);
      driver.apply(script[i]);
    } catch (const std::exception& e) {
      report.failed_primitive = static_cast<int>(i);
      report.failure_reason = e.what();
      break;
    }
    ++report.primitives_applied;
  }
  report.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  return report;
}

}  // namespace demoflow
