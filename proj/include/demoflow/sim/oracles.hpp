#pragma once

#include <cstdio>
#include <memory>
#include <optional>
#include <string>

#include "demoflow/grounder.hpp"
#include "demoflow/instructor.hpp"
#include "demoflow/sim/state.hpp"
#include "demoflow/verifier.hpp"

namespace demoflow::sim {

// Scripted grounding oracle: resolves a widget named in the instruction text
// to the center of its rect on the *current* sim screen. The longest visible
// label contained in the text wins; nothing visible matches -> no target.
class SimGrounder : public GroundingInterface {
 public:
  explicit SimGrounder(std::shared_ptr<SimSession> session) : session_(std::move(session)) {}

  std::optional<GroundedTarget> locate(const std::string& instruction_text,
                                       const Observation&) override {
    std::vector<Widget> widgets = session_->visible_widgets();
    const Widget* best = nullptr;
    for (const auto& w : widgets) {
      if (w.label.empty()) continue;
      if (instruction_text.find(w.label) == std::string::npos) continue;
      if (!best || w.label.size() > best->label.size()) best = &w;
    }
    if (!best) return std::nullopt;
    return GroundedTarget{best->rect.center(), "sim-widget:" + best->id};
  }

 private:
  std::shared_ptr<SimSession> session_;
};

// Acceptance-oracle judge: maps both observations back to recorded state
// summaries and reports success iff the semantic state changed and no
// interrupt overlay is left open.
class SimStateDiffJudge : public JudgeInterface {
 public:
  explicit SimStateDiffJudge(std::shared_ptr<SimSession> session)
      : session_(std::move(session)) {}

  JudgeResponse judge(const std::string&, const Observation& before,
                      const Observation& after) override {
    auto sb = session_->summary_for(before.digest);
    auto sa = session_->summary_for(after.digest);
    if (!sb || !sa)
      throw Error(errc::backend, "observation digest unknown to this sim session");
    if (!sa->overlays.empty())
      return {false, "an unexpected overlay is open"};
    if (*sb == *sa) return {false, "state did not change"};
    return {true, "state advanced"};
  }

 private:
  std::shared_ptr<SimSession> session_;
};

// Change-detecting mock judge: any pixel change counts as success. Identical
// digests always mean failure under this judge.
class PixelDiffJudge : public JudgeInterface {
 public:
  JudgeResponse judge(const std::string&, const Observation& before,
                      const Observation& after) override {
    if (before.digest == after.digest) return {false, "no visible change"};
    return {true, "screen changed"};
  }
};

// Scripted recovery planner: when an interrupt overlay is open it emits the
// world's declared dismiss action; otherwise it has no plan.
class SimPlanner : public TextGenBackendInterface {
 public:
  explicit SimPlanner(std::shared_ptr<SimSession> session) : session_(std::move(session)) {}

  std::string generate(const std::vector<PromptPart>&) override {
    auto overlay_id = session_->topmost_overlay();
    if (!overlay_id) return "";
    const Overlay& overlay = session_->world().overlays.at(*overlay_id);
    for (const auto& it : session_->world().interrupts) {
      if (it.kind != Interrupt::Kind::popup || it.overlay_id != *overlay_id) continue;
      for (const auto& w : overlay.widgets) {
        if (w.id != it.dismiss_widget) continue;
        InstructionStep step = make_instruction_step(
            "Left click on the '" + w.label + "' button; this action closes the pop-up.");
        InstructionList plan{"recovery", {step}};
        return serialize_instruction_file(plan);
      }
    }
    return "";
  }

  std::string model_id() const override { return "sim-planner"; }

 private:
  std::shared_ptr<SimSession> session_;
};

// Deterministic instruction backend for sim-mode compilation: identifies the
// clicked widget through the pre-observation digest recorded by the session
// and names it the way a vision-language backend would.
class SimTextGen : public TextGenBackendInterface {
 public:
  explicit SimTextGen(std::shared_ptr<SimSession> session) : session_(std::move(session)) {}

  std::string generate(const std::vector<PromptPart>& prompt) override {
    // The event description part carries "event: <kind> at (x, y) ...;
    // before: sha256:...".
    std::string desc;
    for (const auto& part : prompt)
      if (part.kind == PromptPart::Kind::text && part.text.starts_with("event: "))
        desc = part.text;
    if (desc.empty()) throw Error(errc::backend, "prompt lacks an event description");

    std::optional<Point> point = parse_point(desc);
    std::string before_ref = parse_ref(desc, "before: ");
    std::string verb = parse_verb(desc);

    if (point && !before_ref.empty()) {
      if (auto summary = session_->summary_for(before_ref)) {
        if (const Widget* w = widget_at(*summary, *point)) {
          return verb + " on the '" + w->label +
                 "' widget shown at its highlighted location; this action advances the task "
                 "to its next state.";
        }
      }
    }
    std::string where = point ? " at position " + to_string(*point) : "";
    return verb + where + "; this action advances the task to its next state.";
  }

  std::string model_id() const override { return "sim-instruction-gen"; }

 private:
  static std::optional<Point> parse_point(const std::string& desc) {
    size_t at = desc.find(" at (");
    if (at == std::string::npos) return std::nullopt;
    int x = 0, y = 0;
    if (std::sscanf(desc.c_str() + at, " at (%d, %d)", &x, &y) != 2) return std::nullopt;
    return Point{x, y};
  }

  static std::string parse_ref(const std::string& desc, const std::string& key) {
    size_t pos = desc.find(key);
    if (pos == std::string::npos) return "";
    size_t start = pos + key.size();
    size_t end = desc.find(';', start);
    return desc.substr(start, end == std::string::npos ? std::string::npos : end - start);
  }

  static std::string parse_verb(const std::string& desc) {
    if (desc.find("event: right_click") == 0) return "Right click";
    if (desc.find("event: double_click") == 0) return "Double click";
    if (desc.find("event: drag") == 0) return "Drag";
    if (desc.find("event: scroll") == 0) return "Scroll";
    return "Left click";
  }

  const Widget* widget_at(const StateSummary& summary, Point p) {
    const WorldSpec& world = session_->world();
    const std::vector<Widget>* widgets = nullptr;
    if (!summary.overlays.empty()) widgets = &world.overlays.at(summary.overlays.back()).widgets;
    else widgets = &world.screens.at(summary.screen).widgets;
    const Widget* hit = nullptr;
    for (const auto& w : *widgets)
      if (w.rect.contains(p)) hit = &w;
    return hit;
  }

  std::shared_ptr<SimSession> session_;
};

}  // namespace demoflow::sim
