#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "demoflow/executor.hpp"
#include "demoflow/image.hpp"
#include "demoflow/sim/world.hpp"

namespace demoflow::sim {

// Full simulator state. The rng evolves only through probability-triggered
// interrupt draws, so identical (spec, seed, primitive sequence) replays are
// bit-identical.
struct SimState {
  std::string current_screen;
  std::vector<std::string> overlay_stack;
  std::map<std::string, bool> flags;
  std::map<std::string, std::string> fields;
  int action_counter = 0;
  uint64_t seed = 0;
  std::mt19937_64 rng;
  Point cursor;
  bool button_held = false;
};

// The semantically meaningful part of a state: what a user could see or a
// goal predicate could test. Counters and rng are excluded so that a
// recovered state compares equal to its checkpoint.
struct StateSummary {
  std::string screen;
  std::vector<std::string> overlays;
  std::map<std::string, bool> flags;
  std::map<std::string, std::string> fields;
  auto operator<=>(const StateSummary&) const = default;
};

inline StateSummary summarize(const SimState& s) {
  return StateSummary{s.current_screen, s.overlay_stack, s.flags, s.fields};
}

inline SimState reset(const WorldSpec& world, uint64_t seed) {
  SimState s;
  s.current_screen = world.initial_screen;
  for (const auto& f : world.flags) s.flags[f] = false;
  for (const auto& f : world.fields) s.fields[f.id] = "";
  s.seed = seed;
  s.rng.seed(seed);
  return s;
}

namespace detail {

inline Pixel id_color(const std::string& id) {
  // FNV-1a; stable widget/screen color derivation.
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : id) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return Pixel{static_cast<uint8_t>(64 + (h & 0xBF)), static_cast<uint8_t>(64 + ((h >> 8) & 0xBF)),
               static_cast<uint8_t>(64 + ((h >> 16) & 0xBF)), 255};
}

inline void fill_rect(Image& img, Rect r, Pixel p) {
  for (int y = r.y; y < r.y + r.h && y < img.height(); ++y)
    for (int x = r.x; x < r.x + r.w && x < img.width(); ++x)
      if (x >= 0 && y >= 0) img.set(x, y, p);
}

// Field contents are painted byte-by-byte so distinct texts render to
// distinct pixels (digest equality must track semantic state).
inline void paint_field(Image& img, const FieldSpec& f, const std::string& text) {
  fill_rect(img, f.rect, Pixel{250, 250, 250, 255});
  int x = f.rect.x + 1;
  int y = f.rect.y + 1;
  for (unsigned char c : text) {
    if (x >= f.rect.x + f.rect.w - 1) {
      x = f.rect.x + 1;
      ++y;
      if (y >= f.rect.y + f.rect.h - 1) break;
    }
    img.set(x, y, Pixel{c, static_cast<uint8_t>(255 - c), 64, 255});
    ++x;
  }
}

inline void paint_widgets(Image& img, const std::vector<Widget>& widgets) {
  for (const auto& w : widgets) fill_rect(img, w.rect, id_color(w.id + "|" + w.label));
}

inline const Interrupt* eval_interrupts(const WorldSpec& world, SimState& s) {
  // One trigger at most per action; draws happen in declaration order so the
  // rng stream is reproducible.
  const Interrupt* fired = nullptr;
  for (const auto& it : world.interrupts) {
    bool hit = false;
    switch (it.trigger.kind) {
      case Trigger::Kind::at_step:
        hit = (s.action_counter == it.trigger.at_step);
        break;
      case Trigger::Kind::probability: {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        hit = (u(s.rng) < it.trigger.probability);
        break;
      }
    }
    if (hit && !fired) fired = &it;
  }
  return fired;
}

inline void route_click(const WorldSpec& world, SimState& s, Point p) {
  const std::vector<Widget>* widgets = nullptr;
  if (!s.overlay_stack.empty()) {
    // Topmost overlay is modal: it receives every click.
    widgets = &world.overlays.at(s.overlay_stack.back()).widgets;
  } else {
    widgets = &world.screens.at(s.current_screen).widgets;
  }
  const Widget* hit = nullptr;
  for (const auto& w : *widgets)
    if (w.rect.contains(p)) hit = &w;  // later widgets sit on top
  if (!hit) return;                    // stray clicks are swallowed
  for (const auto& e : hit->on_click) {
    switch (e.kind) {
      case EffectKind::goto_screen:
        s.current_screen = e.target;
        break;
      case EffectKind::open_overlay:
        s.overlay_stack.push_back(e.target);
        break;
      case EffectKind::close_overlay:
        if (!s.overlay_stack.empty()) s.overlay_stack.pop_back();
        break;
      case EffectKind::set_flag:
        s.flags[e.target] = true;
        break;
      case EffectKind::append_text:
        s.fields[e.target] += hit->label;
        break;
    }
  }
}

// Runs one action-completing primitive: bump the action counter, evaluate
// interrupt triggers, and either let the interrupt preempt the action or run
// the provided behavior.
template <typename Fn>
void run_action(const WorldSpec& world, SimState& s, Fn&& behavior) {
  ++s.action_counter;
  if (s.overlay_stack.empty()) {
    if (const Interrupt* it = eval_interrupts(world, s)) {
      if (it->kind == Interrupt::Kind::popup) s.overlay_stack.push_back(it->overlay_id);
      return;  // the interrupt consumed this action
    }
  }
  behavior();
}

}  // namespace detail

// Transition function. Click, TypeText, KeyUp and Scroll are
// action-completing; interrupts are evaluated once per such action and a
// firing interrupt preempts the action's own effect.
inline SimState apply(const WorldSpec& world, SimState s, const Primitive& p) {
  if (const auto* m = std::get_if<prim::MoveTo>(&p)) {
    s.cursor = m->p;
  } else if (std::get_if<prim::ButtonDown>(&p)) {
    s.button_held = true;
  } else if (std::get_if<prim::ButtonUp>(&p)) {
    s.button_held = false;
  } else if (const auto* c = std::get_if<prim::Click>(&p)) {
    s.cursor = c->p;
    detail::run_action(world, s, [&] {
      for (int i = 0; i < c->count; ++i) detail::route_click(world, s, c->p);
    });
  } else if (const auto* t = std::get_if<prim::TypeText>(&p)) {
    detail::run_action(world, s, [&] {
      if (!s.overlay_stack.empty()) return;  // modal overlay swallows typing
      const Screen& scr = world.screens.at(s.current_screen);
      if (scr.focus_field) s.fields[*scr.focus_field] += t->text;
    });
  } else if (std::get_if<prim::KeyUp>(&p)) {
    detail::run_action(world, s, [] {});  // keys have no screen semantics
  } else if (const auto* sc = std::get_if<prim::Scroll>(&p)) {
    (void)sc;
    detail::run_action(world, s, [] {});
  }
  // KeyDown and Wait change nothing.
  return s;
}

// Pure render: background per screen, flat-color widget rectangles, overlays
// on top, field contents and flags painted so the digest tracks state.
inline Image render(const WorldSpec& world, const SimState& s) {
  const Screen& scr = world.screens.at(s.current_screen);
  Image img(world.screen_size.width, world.screen_size.height,
            detail::id_color("screen|" + s.current_screen));
  detail::paint_widgets(img, scr.widgets);
  for (const auto& f : world.fields)
    if (f.screen == s.current_screen) detail::paint_field(img, f, s.fields.at(f.id));
  for (const auto& oid : s.overlay_stack) {
    const Overlay& o = world.overlays.at(oid);
    detail::fill_rect(img, o.panel, detail::id_color("overlay|" + oid));
    detail::paint_widgets(img, o.widgets);
  }
  // Flag strip along the bottom edge.
  int x = 0;
  for (const auto& [name, value] : s.flags) {
    (void)name;
    if (x >= img.width()) break;
    img.set(x, img.height() - 1,
            value ? Pixel{0, 200, 0, 255} : Pixel{200, 0, 0, 255});
    ++x;
  }
  return img;
}

inline Observation observe(const WorldSpec& world, const SimState& s) {
  return Observation::from_image(render(world, s), s.action_counter);
}

inline bool check_goal(const WorldSpec& world, const SimState& s, const GoalNode& n) {
  switch (n.kind) {
    case GoalNode::Kind::all:
      for (const auto& c : n.children)
        if (!check_goal(world, s, c)) return false;
      return true;
    case GoalNode::Kind::any:
      for (const auto& c : n.children)
        if (check_goal(world, s, c)) return true;
      return false;
    case GoalNode::Kind::negate:
      return !check_goal(world, s, n.children.at(0));
    case GoalNode::Kind::flag_is:
      return s.flags.at(n.name) == n.flag_value;
    case GoalNode::Kind::field_equals:
      return s.fields.at(n.name) == n.value;
    case GoalNode::Kind::screen_is:
      return s.current_screen == n.name;
  }
  return false;
}

inline bool check_goal(const WorldSpec& world, const SimState& s) {
  return check_goal(world, s, world.goal);
}

// Shared simulator instance for one run: the driver mutates it, the scripted
// oracles inspect it, and every rendered observation is indexed by digest so
// judges can map screenshots back to state summaries.
class SimSession {
 public:
  SimSession(WorldSpec world, uint64_t seed)
      : world_(std::move(world)), state_(sim::reset(world_, seed)) {
    remember();
  }

  const WorldSpec& world() const { return world_; }
  const SimState& state() const { return state_; }

  void reset(uint64_t seed) {
    std::lock_guard lock(mu_);
    state_ = sim::reset(world_, seed);
    remember();
  }

  void apply(const Primitive& p) {
    std::lock_guard lock(mu_);
    state_ = sim::apply(world_, std::move(state_), p);
  }

  Observation observe() {
    std::lock_guard lock(mu_);
    Observation obs = sim::observe(world_, state_);
    index_[obs.digest] = summarize(state_);
    return obs;
  }

  std::optional<StateSummary> summary_for(const std::string& digest) const {
    std::lock_guard lock(mu_);
    auto it = index_.find(digest);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Widgets that can currently receive a click.
  std::vector<Widget> visible_widgets() const {
    std::lock_guard lock(mu_);
    if (!state_.overlay_stack.empty())
      return world_.overlays.at(state_.overlay_stack.back()).widgets;
    return world_.screens.at(state_.current_screen).widgets;
  }

  std::optional<std::string> topmost_overlay() const {
    std::lock_guard lock(mu_);
    if (state_.overlay_stack.empty()) return std::nullopt;
    return state_.overlay_stack.back();
  }

  bool goal_reached() const {
    std::lock_guard lock(mu_);
    return check_goal(world_, state_);
  }

 private:
  void remember() {
    index_[sim::observe(world_, state_).digest] = summarize(state_);
  }

  WorldSpec world_;
  SimState state_;
  std::unordered_map<std::string, StateSummary> index_;
  mutable std::mutex mu_;
};

}  // namespace demoflow::sim
