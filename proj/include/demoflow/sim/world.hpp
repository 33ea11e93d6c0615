#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "demoflow/errors.hpp"
#include "demoflow/geometry.hpp"

namespace demoflow::sim {

enum class EffectKind { goto_screen, open_overlay, close_overlay, set_flag, append_text };

struct Effect {
  EffectKind kind = EffectKind::goto_screen;
  std::string target;  // screen / overlay / flag / field id (unused for close_overlay)
  bool operator==(const Effect&) const = default;
};

struct Widget {
  std::string id;
  std::string label;
  Rect rect;
  std::vector<Effect> on_click;
};

struct Screen {
  std::string id;
  std::vector<Widget> widgets;
  std::optional<std::string> focus_field;  // the single focusable field, if any
};

struct Overlay {
  std::string id;
  Rect panel;
  std::vector<Widget> widgets;
};

struct FieldSpec {
  std::string id;
  std::string screen;
  Rect rect;
};

struct Trigger {
  enum class Kind { at_step, probability } kind = Kind::at_step;
  int at_step = 1;          // 1-based count of applied actions
  double probability = 0.0;
};

// An unscheduled environment change. `popup` opens an overlay that swallows
// the triggering action; `drop` silently swallows it.
struct Interrupt {
  enum class Kind { popup, drop } kind = Kind::popup;
  std::string overlay_id;      // popup only
  std::string dismiss_widget;  // popup only: widget id inside the overlay
  Trigger trigger;
};

// Goal predicate tree over flags, fields, and the current screen.
struct GoalNode {
  enum class Kind { all, any, negate, flag_is, field_equals, screen_is } kind = Kind::all;
  std::vector<GoalNode> children;  // all / any / negate
  std::string name;                // flag / field / screen id
  std::string value;               // field_equals comparison value
  bool flag_value = true;          // flag_is expected value
};

struct WorldSpec {
  int format_version = 1;
  Size screen_size;
  std::string initial_screen;
  std::map<std::string, Screen> screens;
  std::map<std::string, Overlay> overlays;
  std::vector<std::string> flags;
  std::vector<FieldSpec> fields;
  std::vector<Interrupt> interrupts;
  GoalNode goal;

  const FieldSpec* find_field(const std::string& id) const {
    for (const auto& f : fields)
      if (f.id == id) return &f;
    return nullptr;
  }
};

namespace detail {

inline Rect rect_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4)
    throw Error(errc::schema, where + ": rect must be [x, y, w, h]");
  return Rect{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

inline Effect effect_from_json(const nlohmann::json& j, const std::string& where) {
  Effect e;
  std::string kind = j.at("effect").get<std::string>();
  if (kind == "goto") {
    e.kind = EffectKind::goto_screen;
    e.target = j.at("screen").get<std::string>();
  } else if (kind == "open_overlay") {
    e.kind = EffectKind::open_overlay;
    e.target = j.at("overlay").get<std::string>();
  } else if (kind == "close_overlay") {
    e.kind = EffectKind::close_overlay;
  } else if (kind == "set_flag") {
    e.kind = EffectKind::set_flag;
    e.target = j.at("flag").get<std::string>();
  } else if (kind == "append_text") {
    e.kind = EffectKind::append_text;
    e.target = j.at("field").get<std::string>();
  } else {
    throw Error(errc::schema, where + ": unknown effect \"" + kind + "\"");
  }
  return e;
}

inline std::vector<Widget> widgets_from_json(const nlohmann::json& j, const std::string& where) {
  std::vector<Widget> out;
  for (const auto& wj : j) {
    Widget w;
    w.id = wj.at("id").get<std::string>();
    w.label = wj.at("label").get<std::string>();
    w.rect = rect_from_json(wj.at("rect"), where + "/" + w.id);
    if (wj.contains("on_click")) {
      const auto& oc = wj["on_click"];
      if (oc.is_array()) {
        for (const auto& ej : oc) w.on_click.push_back(effect_from_json(ej, where + "/" + w.id));
      } else {
        w.on_click.push_back(effect_from_json(oc, where + "/" + w.id));
      }
    }
    out.push_back(std::move(w));
  }
  return out;
}

inline GoalNode goal_from_json(const nlohmann::json& j, const std::string& where) {
  GoalNode n;
  if (j.contains("all")) {
    n.kind = GoalNode::Kind::all;
    for (const auto& c : j["all"]) n.children.push_back(goal_from_json(c, where));
  } else if (j.contains("any")) {
    n.kind = GoalNode::Kind::any;
    for (const auto& c : j["any"]) n.children.push_back(goal_from_json(c, where));
  } else if (j.contains("not")) {
    n.kind = GoalNode::Kind::negate;
    n.children.push_back(goal_from_json(j["not"], where));
  } else if (j.contains("flag")) {
    n.kind = GoalNode::Kind::flag_is;
    n.name = j["flag"].get<std::string>();
    n.flag_value = j.value("is", true);
  } else if (j.contains("field")) {
    n.kind = GoalNode::Kind::field_equals;
    n.name = j["field"].get<std::string>();
    n.value = j.at("equals").get<std::string>();
  } else if (j.contains("screen")) {
    n.kind = GoalNode::Kind::screen_is;
    n.name = j["screen"].get<std::string>();
  } else {
    throw Error(errc::schema, where + ": goal node needs one of all/any/not/flag/field/screen");
  }
  return n;
}

inline void validate_goal(const GoalNode& n, const WorldSpec& w) {
  switch (n.kind) {
    case GoalNode::Kind::all:
    case GoalNode::Kind::any:
    case GoalNode::Kind::negate:
      for (const auto& c : n.children) validate_goal(c, w);
      break;
    case GoalNode::Kind::flag_is:
      if (std::find(w.flags.begin(), w.flags.end(), n.name) == w.flags.end())
        throw Error(errc::validation, "goal references undeclared flag \"" + n.name + "\"");
      break;
    case GoalNode::Kind::field_equals:
      if (!w.find_field(n.name))
        throw Error(errc::validation, "goal references undeclared field \"" + n.name + "\"");
      break;
    case GoalNode::Kind::screen_is:
      if (!w.screens.count(n.name))
        throw Error(errc::validation, "goal references unknown screen \"" + n.name + "\"");
      break;
  }
}

inline void validate_effects(const WorldSpec& w, const Widget& widget, const std::string& where) {
  for (const auto& e : widget.on_click) {
    switch (e.kind) {
      case EffectKind::goto_screen:
        if (!w.screens.count(e.target))
          throw Error(errc::validation, where + "/" + widget.id + ": goto references unknown screen \"" + e.target + "\"");
        break;
      case EffectKind::open_overlay:
        if (!w.overlays.count(e.target))
          throw Error(errc::validation, where + "/" + widget.id + ": open_overlay references unknown overlay \"" + e.target + "\"");
        break;
      case EffectKind::close_overlay:
        break;
      case EffectKind::set_flag:
        if (std::find(w.flags.begin(), w.flags.end(), e.target) == w.flags.end())
          throw Error(errc::validation, where + "/" + widget.id + ": set_flag references undeclared flag \"" + e.target + "\"");
        break;
      case EffectKind::append_text:
        if (!w.find_field(e.target))
          throw Error(errc::validation, where + "/" + widget.id + ": append_text references undeclared field \"" + e.target + "\"");
        break;
    }
  }
}

}  // namespace detail

inline WorldSpec load_world(const std::string& bytes) {
  nlohmann::json j = nlohmann::json::parse(bytes, nullptr, false);
  if (j.is_discarded()) throw Error(errc::parse, "world spec is not valid JSON");

  WorldSpec w;
  w.format_version = j.value("format_version", 1);
  if (w.format_version != 1)
    throw Error(errc::schema, "unsupported world format version");
  const auto& ss = j.at("screen_size");
  w.screen_size = Size{ss[0].get<int>(), ss[1].get<int>()};
  if (w.screen_size.width <= 0 || w.screen_size.height <= 0)
    throw Error(errc::validation, "screen_size must be positive");
  w.initial_screen = j.at("initial_screen").get<std::string>();

  for (const auto& [id, sj] : j.at("screens").items()) {
    Screen s;
    s.id = id;
    if (sj.contains("widgets")) s.widgets = detail::widgets_from_json(sj["widgets"], "screen " + id);
    if (sj.contains("focus_field")) s.focus_field = sj["focus_field"].get<std::string>();
    w.screens.emplace(id, std::move(s));
  }
  if (j.contains("overlays")) {
    for (const auto& [id, oj] : j["overlays"].items()) {
      Overlay o;
      o.id = id;
      o.panel = detail::rect_from_json(oj.at("panel"), "overlay " + id);
      if (oj.contains("widgets")) o.widgets = detail::widgets_from_json(oj["widgets"], "overlay " + id);
      w.overlays.emplace(id, std::move(o));
    }
  }
  if (j.contains("flags")) w.flags = j["flags"].get<std::vector<std::string>>();
  if (j.contains("fields")) {
    for (const auto& [id, fj] : j["fields"].items()) {
      FieldSpec f;
      f.id = id;
      f.screen = fj.at("screen").get<std::string>();
      f.rect = detail::rect_from_json(fj.at("rect"), "field " + id);
      w.fields.push_back(std::move(f));
    }
  }
  if (j.contains("interrupts")) {
    for (const auto& ij : j["interrupts"]) {
      Interrupt it;
      std::string kind = ij.value("kind", "popup");
      if (kind == "popup") it.kind = Interrupt::Kind::popup;
      else if (kind == "drop") it.kind = Interrupt::Kind::drop;
      else throw Error(errc::schema, "unknown interrupt kind \"" + kind + "\"");
      if (it.kind == Interrupt::Kind::popup) {
        it.overlay_id = ij.at("overlay").get<std::string>();
        it.dismiss_widget = ij.at("dismiss_widget").get<std::string>();
      }
      const auto& tj = ij.at("trigger");
      if (tj.contains("at_step")) {
        it.trigger.kind = Trigger::Kind::at_step;
        it.trigger.at_step = tj["at_step"].get<int>();
        if (it.trigger.at_step < 1)
          throw Error(errc::validation, "interrupt at_step must be >= 1");
      } else if (tj.contains("probability")) {
        it.trigger.kind = Trigger::Kind::probability;
        it.trigger.probability = tj["probability"].get<double>();
        if (!(it.trigger.probability >= 0.0 && it.trigger.probability <= 1.0))
          throw Error(errc::validation, "interrupt probability outside [0, 1]");
      } else {
        throw Error(errc::schema, "interrupt trigger needs at_step or probability");
      }
      w.interrupts.push_back(std::move(it));
    }
  }
  w.goal = detail::goal_from_json(j.at("goal"), "goal");

  // Eager cross-reference and bounds validation.
  if (!w.screens.count(w.initial_screen))
    throw Error(errc::validation, "initial_screen \"" + w.initial_screen + "\" does not exist");
  for (const auto& [id, s] : w.screens) {
    for (const auto& widget : s.widgets) {
      if (!widget.rect.within(w.screen_size))
        throw Error(errc::validation, "screen " + id + "/" + widget.id + ": rect outside screen bounds");
      detail::validate_effects(w, widget, "screen " + id);
    }
    if (s.focus_field) {
      const FieldSpec* f = w.find_field(*s.focus_field);
      if (!f) throw Error(errc::validation, "screen " + id + ": focus_field \"" + *s.focus_field + "\" undeclared");
      if (f->screen != id)
        throw Error(errc::validation, "screen " + id + ": focus_field \"" + *s.focus_field + "\" belongs to screen " + f->screen);
    }
  }
  for (const auto& [id, o] : w.overlays) {
    if (!o.panel.within(w.screen_size))
      throw Error(errc::validation, "overlay " + id + ": panel outside screen bounds");
    for (const auto& widget : o.widgets) {
      if (!widget.rect.within(w.screen_size))
        throw Error(errc::validation, "overlay " + id + "/" + widget.id + ": rect outside screen bounds");
      detail::validate_effects(w, widget, "overlay " + id);
    }
  }
  for (const auto& f : w.fields) {
    if (!w.screens.count(f.screen))
      throw Error(errc::validation, "field " + f.id + ": unknown screen \"" + f.screen + "\"");
    if (!f.rect.within(w.screen_size))
      throw Error(errc::validation, "field " + f.id + ": rect outside screen bounds");
  }
  for (const auto& it : w.interrupts) {
    if (it.kind != Interrupt::Kind::popup) continue;
    auto ov = w.overlays.find(it.overlay_id);
    if (ov == w.overlays.end())
      throw Error(errc::validation, "interrupt references unknown overlay \"" + it.overlay_id + "\"");
    bool has_dismiss = false;
    for (const auto& widget : ov->second.widgets)
      if (widget.id == it.dismiss_widget) has_dismiss = true;
    if (!has_dismiss)
      throw Error(errc::validation, "interrupt dismiss widget \"" + it.dismiss_widget +
                                        "\" not found in overlay \"" + it.overlay_id + "\"");
  }
  detail::validate_goal(w.goal, w);
  return w;
}

inline WorldSpec load_world_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io, "cannot read world spec: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_world(bytes);
}

}  // namespace demoflow::sim
