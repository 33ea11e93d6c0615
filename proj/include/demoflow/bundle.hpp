#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "demoflow/errors.hpp"
#include "demoflow/events.hpp"
#include "demoflow/png_io.hpp"

namespace demoflow {

constexpr int kBundleFormatVersion = 1;

// Demo bundle layout:
//   manifest.json                 screen size, session id, per-step frame times
//   events.jsonl                  one InputEvent per line
//   screenshots/<step>_pre.png
//   screenshots/<step>_post.png
inline void write_bundle(const Demonstration& demo, const std::filesystem::path& dir) {
  validate_demonstration(demo);
  std::error_code ec;
  std::filesystem::create_directories(dir / "screenshots", ec);
  if (ec) throw Error(errc::io, "cannot create bundle directory: " + dir.string());

  nlohmann::json manifest;
  manifest["format_version"] = kBundleFormatVersion;
  manifest["session_id"] = demo.session_id;
  manifest["screen_size"] = {demo.screen_size.width, demo.screen_size.height};
  manifest["steps"] = nlohmann::json::array();

  std::ofstream events(dir / "events.jsonl");
  if (!events) throw Error(errc::io, "cannot write events.jsonl");
  for (size_t i = 0; i < demo.steps.size(); ++i) {
    const DemoStep& s = demo.steps[i];
    events << event_to_json(s.event).dump() << '\n';
    manifest["steps"].push_back({{"pre_ts", s.obs_before.timestamp_ms},
                                 {"post_ts", s.obs_after.timestamp_ms}});
    write_png(*s.obs_before.image, dir / "screenshots" / (std::to_string(i) + "_pre.png"));
    write_png(*s.obs_after.image, dir / "screenshots" / (std::to_string(i) + "_post.png"));
  }
  events.close();

  std::ofstream mf(dir / "manifest.json");
  if (!mf) throw Error(errc::io, "cannot write manifest.json");
  mf << manifest.dump(2) << '\n';
}

inline Demonstration read_bundle(const std::filesystem::path& dir) {
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw Error(errc::io, "missing manifest.json in " + dir.string());
  nlohmann::json manifest = nlohmann::json::parse(mf, nullptr, false);
  if (manifest.is_discarded()) throw Error(errc::parse, "malformed manifest.json");
  if (manifest.at("format_version").get<int>() != kBundleFormatVersion)
    throw Error(errc::schema, "unsupported bundle format version");

  Demonstration demo;
  demo.session_id = manifest.at("session_id").get<std::string>();
  demo.screen_size = Size{manifest.at("screen_size")[0].get<int>(),
                          manifest.at("screen_size")[1].get<int>()};

  std::ifstream events(dir / "events.jsonl");
  if (!events) throw Error(errc::io, "missing events.jsonl in " + dir.string());
  std::string line;
  size_t i = 0;
  const auto& steps = manifest.at("steps");
  while (std::getline(events, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (i >= steps.size()) throw Error(errc::schema, "more events than manifest steps");
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw Error(errc::parse, "malformed event at line " + std::to_string(i + 1));
    DemoStep step;
    step.event = event_from_json(j);
    step.obs_before = Observation::from_image(
        read_png(dir / "screenshots" / (std::to_string(i) + "_pre.png")),
        steps[i].at("pre_ts").get<int64_t>());
    step.obs_after = Observation::from_image(
        read_png(dir / "screenshots" / (std::to_string(i) + "_post.png")),
        steps[i].at("post_ts").get<int64_t>());
    demo.steps.push_back(std::move(step));
    ++i;
  }
  if (i != steps.size()) throw Error(errc::schema, "fewer events than manifest steps");
  validate_demonstration(demo);
  return demo;
}

// Stable identity of a bundle: FNV over the digests and events it contains.
inline std::string bundle_digest(const Demonstration& demo) {
  std::string acc = demo.session_id;
  for (const auto& s : demo.steps) {
    acc += s.obs_before.digest;
    acc += event_to_json(s.event).dump();
    acc += s.obs_after.digest;
  }
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : acc) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace demoflow
