#pragma once

#include <atomic>
#include <cctype>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include <json.hpp>

#include "demoflow/errors.hpp"
#include "demoflow/events.hpp"
#include "demoflow/executor.hpp"
#include "demoflow/image.hpp"

namespace demoflow {

struct RecorderConfig {
  int64_t frame_interval_ms = 100;
  int64_t double_click_window_ms = 400;
  int64_t text_burst_gap_ms = 1000;
  int64_t settle_delay_ms = 300;
  std::filesystem::path output_dir;
};

inline void validate(const RecorderConfig& c) {
  if (c.frame_interval_ms < 10)
    throw Error(errc::config, "frame_interval must be >= 10 ms");
  if (c.double_click_window_ms <= 0 || c.text_burst_gap_ms <= 0)
    throw Error(errc::config, "click window and burst gap must be positive");
  if (c.settle_delay_ms < 0) throw Error(errc::config, "settle delay must be >= 0");
}

// Raw, pre-coalescing input primitives as an input hook delivers them.
enum class RawKind { key_down, key_up, button_down, button_up, pointer_move, wheel };

struct RawEvent {
  RawKind kind = RawKind::key_down;
  MouseButton button = MouseButton::left;
  Point position;
  std::string key;  // key token; printable keys are single characters
  int wheel_delta = 0;
  bool ctrl = false;
  bool alt = false;
  bool meta = false;
  int64_t timestamp_ms = 0;
};

struct RawEventStream {
  std::vector<RawEvent> events;
};

inline void validate(const RawEventStream& s) {
  int64_t prev = 0;
  for (const auto& e : s.events) {
    if (e.timestamp_ms < prev)
      throw Error(errc::validation, "raw event timestamps must be non-decreasing");
    prev = e.timestamp_ms;
  }
}

inline nlohmann::json raw_event_to_json(const RawEvent& e) {
  nlohmann::json j;
  switch (e.kind) {
    case RawKind::key_down: j["kind"] = "key_down"; break;
    case RawKind::key_up: j["kind"] = "key_up"; break;
    case RawKind::button_down: j["kind"] = "button_down"; break;
    case RawKind::button_up: j["kind"] = "button_up"; break;
    case RawKind::pointer_move: j["kind"] = "pointer_move"; break;
    case RawKind::wheel: j["kind"] = "wheel"; break;
  }
  j["ts"] = e.timestamp_ms;
  if (e.kind == RawKind::button_down || e.kind == RawKind::button_up ||
      e.kind == RawKind::pointer_move || e.kind == RawKind::wheel) {
    j["pos"] = {e.position.x, e.position.y};
    if (e.button == MouseButton::right) j["button"] = "right";
  }
  if (!e.key.empty()) j["key"] = e.key;
  if (e.wheel_delta != 0) j["delta"] = e.wheel_delta;
  if (e.ctrl) j["ctrl"] = true;
  if (e.alt) j["alt"] = true;
  if (e.meta) j["meta"] = true;
  return j;
}

inline RawEvent raw_event_from_json(const nlohmann::json& j) {
  RawEvent e;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "key_down") e.kind = RawKind::key_down;
  else if (kind == "key_up") e.kind = RawKind::key_up;
  else if (kind == "button_down") e.kind = RawKind::button_down;
  else if (kind == "button_up") e.kind = RawKind::button_up;
  else if (kind == "pointer_move") e.kind = RawKind::pointer_move;
  else if (kind == "wheel") e.kind = RawKind::wheel;
  else throw Error(errc::schema, "unknown raw event kind: " + kind);
  e.timestamp_ms = j.at("ts").get<int64_t>();
  if (j.contains("pos")) e.position = Point{j["pos"][0].get<int>(), j["pos"][1].get<int>()};
  if (j.value("button", "left") == std::string("right")) e.button = MouseButton::right;
  if (j.contains("key")) e.key = j["key"].get<std::string>();
  if (j.contains("delta")) e.wheel_delta = j["delta"].get<int>();
  e.ctrl = j.value("ctrl", false);
  e.alt = j.value("alt", false);
  e.meta = j.value("meta", false);
  return e;
}

namespace detail {

inline bool is_printable_key(const RawEvent& e) {
  if (e.ctrl || e.alt || e.meta) return false;  // chords are actions, not text
  return e.key.size() == 1 && std::isprint(static_cast<unsigned char>(e.key[0]));
}

inline std::string chord_token(const RawEvent& e) {
  std::string t;
  if (e.ctrl) t += "ctrl+";
  if (e.alt) t += "alt+";
  if (e.meta) t += "meta+";
  t += e.key;
  return t;
}

}  // namespace detail

// Merges raw input into semantic events: printable key runs become one
// text_burst, same-point click pairs inside the window become a
// double_click, press-move-release becomes a drag. Order is preserved and no
// payload character is dropped.
inline std::vector<InputEvent> coalesce(const RawEventStream& raw, const RecorderConfig& cfg) {
  validate(raw);
  std::vector<InputEvent> out;

  struct Burst {
    std::string text;
    int64_t start_ts = 0;
    int64_t last_ts = 0;
  };
  struct PendingClick {
    Point point;
    int64_t ts = 0;
  };
  struct HeldButton {
    MouseButton button = MouseButton::left;
    Point point;
    int64_t ts = 0;
  };

  std::optional<Burst> burst;
  std::optional<PendingClick> pending_click;  // left clicks awaiting a double
  std::optional<HeldButton> held;

  auto flush_burst = [&] {
    if (!burst) return;
    out.push_back(InputEvent{EventKind::text_burst, std::nullopt, std::nullopt, "",
                             burst->text, 0, burst->start_ts});
    burst.reset();
  };
  auto flush_click = [&] {
    if (!pending_click) return;
    out.push_back(InputEvent{EventKind::left_click, pending_click->point, std::nullopt, "",
                             "", 0, pending_click->ts});
    pending_click.reset();
  };

  for (const auto& e : raw.events) {
    switch (e.kind) {
      case RawKind::key_down: {
        flush_click();
        if (detail::is_printable_key(e)) {
          if (burst && e.timestamp_ms - burst->last_ts <= cfg.text_burst_gap_ms) {
            burst->text += e.key;
            burst->last_ts = e.timestamp_ms;
          } else {
            flush_burst();
            burst = Burst{e.key, e.timestamp_ms, e.timestamp_ms};
          }
        } else {
          flush_burst();
          out.push_back(InputEvent{EventKind::key_press, std::nullopt, std::nullopt,
                                   detail::chord_token(e), "", 0, e.timestamp_ms});
        }
        break;
      }
      case RawKind::key_up:
        break;  // key_down carries the semantics
      case RawKind::button_down:
        flush_burst();
        held = HeldButton{e.button, e.position, e.timestamp_ms};
        break;
      case RawKind::button_up: {
        if (!held) break;  // unmatched release
        HeldButton down = *held;
        held.reset();
        if (e.position != down.point) {
          flush_click();
          out.push_back(InputEvent{EventKind::drag, down.point, e.position, "", "", 0,
                                   down.ts});
        } else if (down.button == MouseButton::right) {
          flush_click();
          out.push_back(InputEvent{EventKind::right_click, down.point, std::nullopt, "",
                                   "", 0, down.ts});
        } else if (pending_click && pending_click->point == down.point &&
                   down.ts - pending_click->ts <= cfg.double_click_window_ms) {
          int64_t ts = pending_click->ts;
          pending_click.reset();
          out.push_back(InputEvent{EventKind::double_click, down.point, std::nullopt, "",
                                   "", 0, ts});
        } else {
          flush_click();
          pending_click = PendingClick{down.point, down.ts};
        }
        break;
      }
      case RawKind::pointer_move:
        break;  // absorbed into drags; hover is not an action
      case RawKind::wheel:
        flush_burst();
        flush_click();
        out.push_back(InputEvent{EventKind::scroll, e.position, std::nullopt, "", "",
                                 e.wheel_delta, e.timestamp_ms});
        break;
    }
  }
  flush_burst();
  flush_click();
  return out;
}

// Abstract screenshot source. Tests and sim mode use the simulator's capture;
// a real OS backend is an integration point behind the same interface.
class ScreenCaptureInterface {
 public:
  virtual ~ScreenCaptureInterface() = default;
  virtual Image capture() = 0;
  virtual Size screen_size() const = 0;
};

// Abstract input hook registration; the callback receives raw events.
class InputHookInterface {
 public:
  virtual ~InputHookInterface() = default;
  virtual void start(std::function<void(const RawEvent&)> callback) = 0;
  virtual void stop() = 0;
};

// Deterministic, clock-driven recording session. Frames are sampled on a
// fixed schedule (t = 0, interval, 2*interval, ...) plus one settle capture
// after every input event; raw events land in an append-only queue consumed
// once at stop. Thread-safe: the sampler and the hook callback may run
// concurrently.
class RecorderSession {
 public:
  RecorderSession(RecorderConfig cfg, std::shared_ptr<ScreenCaptureInterface> capture)
      : cfg_(std::move(cfg)), capture_(std::move(capture)) {
    validate(cfg_);
    if (!capture_) throw Error(errc::config, "capture source is required");
    if (!cfg_.output_dir.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(cfg_.output_dir, ec);
      if (ec || !std::filesystem::is_directory(cfg_.output_dir))
        throw Error(errc::io, "output_dir is not writable: " + cfg_.output_dir.string());
      auto probe = cfg_.output_dir / ".write-probe";
      std::ofstream f(probe);
      if (!f) throw Error(errc::io, "output_dir is not writable: " + cfg_.output_dir.string());
      f.close();
      std::filesystem::remove(probe, ec);
    }
    sample_at(0);  // session clock starts at zero with one frame
    next_sample_ = cfg_.frame_interval_ms;
  }

  const RecorderConfig& config() const { return cfg_; }

  // Samples every frame due at or before now_ms.
  void advance_to(int64_t now_ms) {
    std::lock_guard lock(mu_);
    advance_locked(now_ms);
  }

  // Hook callback: timestamps must be session-relative and non-decreasing.
  void on_raw_event(const RawEvent& ev) {
    std::lock_guard lock(mu_);
    if (ev.timestamp_ms < clock_)
      throw Error(errc::validation, "raw event timestamp went backwards");
    advance_locked(ev.timestamp_ms);
    raw_.events.push_back(ev);
    settle_due_.push_back(ev.timestamp_ms + cfg_.settle_delay_ms);
  }

  // Finalizes the session: captures the trailing frame, coalesces the raw
  // stream, and pairs each event with its surrounding frames.
  Demonstration stop() {
    std::lock_guard lock(mu_);
    if (raw_.events.empty())
      throw Error(errc::validation, "no input events were captured");

    int64_t last_event_ts = raw_.events.back().timestamp_ms;
    advance_locked(std::max(clock_, last_event_ts + cfg_.settle_delay_ms));
    if (frames_.back().timestamp_ms <= last_event_ts)
      sample_at(last_event_ts + std::max<int64_t>(cfg_.settle_delay_ms, 1));

    std::vector<InputEvent> events = coalesce(raw_, cfg_);
    Demonstration demo;
    demo.screen_size = capture_->screen_size();
    demo.session_id = session_id_;
    for (const auto& ev : events) {
      DemoStep step;
      step.event = ev;
      step.obs_before = latest_frame_at_or_before(ev.timestamp_ms);
      step.obs_after = first_frame_after(ev.timestamp_ms);
      demo.steps.push_back(std::move(step));
    }
    validate_demonstration(demo);
    return demo;
  }

  void set_session_id(std::string id) { session_id_ = std::move(id); }

 private:
  void advance_locked(int64_t now_ms) {
    while (next_sample_ <= now_ms) {
      sample_at(next_sample_);
      next_sample_ += cfg_.frame_interval_ms;
    }
    while (!settle_due_.empty() && settle_due_.front() <= now_ms) {
      int64_t t = settle_due_.front();
      settle_due_.pop_front();
      if (frames_.empty() || frames_.back().timestamp_ms < t) sample_at(t);
    }
    clock_ = std::max(clock_, now_ms);
  }

  void sample_at(int64_t ts) {
    frames_.push_back(Observation::from_image(capture_->capture(), ts));
  }

  Observation latest_frame_at_or_before(int64_t ts) const {
    const Observation* best = nullptr;
    for (const auto& f : frames_) {
      if (f.timestamp_ms <= ts) best = &f;
      else break;
    }
    if (!best) throw Error(errc::validation, "no frame precedes event at " + std::to_string(ts));
    return *best;
  }

  Observation first_frame_after(int64_t ts) const {
    for (const auto& f : frames_)
      if (f.timestamp_ms > ts) return f;
    throw Error(errc::validation, "no frame follows event at " + std::to_string(ts));
  }

  RecorderConfig cfg_;
  std::shared_ptr<ScreenCaptureInterface> capture_;
  std::vector<Observation> frames_;
  RawEventStream raw_;
  std::deque<int64_t> settle_due_;
  int64_t next_sample_ = 0;
  int64_t clock_ = 0;
  std::string session_id_ = "session";
  std::mutex mu_;
};

// Real-time wrapper: registers the input hook and runs a background sampler
// against a monotonic clock. The clock function is injectable for tests.
class LiveRecorder {
 public:
  LiveRecorder(RecorderConfig cfg, std::shared_ptr<ScreenCaptureInterface> capture,
               std::shared_ptr<InputHookInterface> hooks,
               std::function<int64_t()> now_ms = {})
      : session_(std::move(cfg), std::move(capture)), hooks_(std::move(hooks)) {
    if (!hooks_) throw Error(errc::config, "input hook source is required");
    auto epoch = std::chrono::steady_clock::now();
    now_ = now_ms ? std::move(now_ms) : [epoch] {
      return std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::steady_clock::now() - epoch)
          .count();
    };
    hooks_->start([this](const RawEvent& ev) {
      RawEvent stamped = ev;
      if (stamped.timestamp_ms <= 0) stamped.timestamp_ms = now_();
      session_.on_raw_event(stamped);
    });
    running_ = true;
    sampler_ = std::thread([this] {
      int64_t half = std::max<int64_t>(session_.config().frame_interval_ms / 2, 5);
      while (running_) {
        session_.advance_to(now_());
        std::this_thread::sleep_for(std::chrono::milliseconds(half));
      }
    });
  }

  ~LiveRecorder() {
    if (running_) {
      try {
        stop();
      } catch (...) {
      }
    }
  }

  Demonstration stop() {
    hooks_->stop();
    running_ = false;
    if (sampler_.joinable()) sampler_.join();
    return session_.stop();
  }

  RecorderSession& session() { return session_; }

 private:
  RecorderSession session_;
  std::shared_ptr<InputHookInterface> hooks_;
  std::function<int64_t()> now_;
  std::atomic<bool> running_{false};
  std::thread sampler_;
};

}  // namespace demoflow
