#pragma once

#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "demoflow/errors.hpp"
#include "demoflow/grounder.hpp"
#include "demoflow/instructor.hpp"
#include "demoflow/png_io.hpp"
#include "demoflow/verifier.hpp"

namespace demoflow {

struct EndpointConfig {
  std::string url;             // e.g. "http://host:port/path"
  std::string credential_env;  // environment variable holding the bearer token
  int timeout_ms = 30000;
  std::string model;
};

namespace detail {

inline std::string base64_encode(const unsigned char* data, size_t len) {
  static const char* tbl = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (size_t i = 0; i < len; i += 3) {
    uint32_t v = data[i] << 16;
    if (i + 1 < len) v |= data[i + 1] << 8;
    if (i + 2 < len) v |= data[i + 2];
    out.push_back(tbl[(v >> 18) & 63]);
    out.push_back(tbl[(v >> 12) & 63]);
    out.push_back(i + 1 < len ? tbl[(v >> 6) & 63] : '=');
    out.push_back(i + 2 < len ? tbl[v & 63] : '=');
  }
  return out;
}

inline std::string png_base64(const Observation& obs) {
  if (!obs.image) throw Error(errc::contract, "observation has no image");
  std::string bytes = encode_png(*obs.image);
  return base64_encode(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
}

struct ParsedUrl {
  std::string host_port;  // scheme://host:port
  std::string path;
};

inline ParsedUrl split_url(const std::string& url) {
  size_t scheme = url.find("://");
  if (scheme == std::string::npos) throw Error(errc::config, "endpoint url lacks a scheme: " + url);
  size_t path = url.find('/', scheme + 3);
  if (path == std::string::npos) return {url, "/"};
  return {url.substr(0, path), url.substr(path)};
}

inline nlohmann::json post_json(const EndpointConfig& cfg, const nlohmann::json& body) {
  ParsedUrl u = split_url(cfg.url);
  httplib::Client client(u.host_port);
  client.set_connection_timeout(0, cfg.timeout_ms * 1000);
  client.set_read_timeout(cfg.timeout_ms / 1000, (cfg.timeout_ms % 1000) * 1000);
  httplib::Headers headers;
  if (!cfg.credential_env.empty()) {
    const char* token = std::getenv(cfg.credential_env.c_str());
    if (!token)
      throw Error(errc::config, "credential env var not set: " + cfg.credential_env);
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }
  auto res = client.Post(u.path, headers, body.dump(), "application/json");
  if (!res)
    throw Error(errc::backend, "request to " + cfg.url + " failed: " +
                                   httplib::to_string(res.error()));
  if (res->status != 200)
    throw Error(errc::backend,
                "endpoint " + cfg.url + " returned status " + std::to_string(res->status));
  nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
  if (j.is_discarded()) throw Error(errc::backend, "endpoint returned malformed JSON");
  return j;
}

}  // namespace detail

// Text-generation endpoint. Request: {"model", "parts": [{"type": "text",
// "text"} | {"type": "image", "ref", "width", "height", "png_b64"}]}.
// Response: {"text": "..."}.
class HttpTextGen : public TextGenBackendInterface {
 public:
  explicit HttpTextGen(EndpointConfig cfg) : cfg_(std::move(cfg)) {}

  std::string generate(const std::vector<PromptPart>& prompt) override {
    nlohmann::json body;
    body["model"] = cfg_.model;
    body["parts"] = nlohmann::json::array();
    for (const auto& p : prompt) {
      if (p.kind == PromptPart::Kind::text) {
        body["parts"].push_back({{"type", "text"}, {"text", p.text}});
      } else {
        body["parts"].push_back({{"type", "image"},
                                 {"ref", p.image.image_ref()},
                                 {"width", p.image.width()},
                                 {"height", p.image.height()},
                                 {"png_b64", detail::png_base64(p.image)}});
      }
    }
    nlohmann::json res = detail::post_json(cfg_, body);
    if (!res.contains("text") || !res["text"].is_string())
      throw Error(errc::backend, "text endpoint response lacks \"text\"");
    return res["text"].get<std::string>();
  }

  std::string model_id() const override { return cfg_.model; }

 private:
  EndpointConfig cfg_;
};

// Grounding endpoint. Grounding services differ in wire schema, so the
// request body template and the response coordinate locations are
// configurable. The template placeholders {{instruction}}, {{image_b64}},
// {{width}} and {{height}} are substituted; the coordinates are read through
// JSON pointers. An absent/null coordinate means no target.
struct GrounderWire {
  std::string request_template =
      R"({"instruction": {{instruction}}, "image_b64": "{{image_b64}}", "width": {{width}}, "height": {{height}}})";
  std::string x_pointer = "/point/x";
  std::string y_pointer = "/point/y";
};

class HttpGrounder : public GroundingInterface {
 public:
  explicit HttpGrounder(EndpointConfig cfg, GrounderWire wire = {})
      : cfg_(std::move(cfg)), wire_(std::move(wire)) {}

  std::optional<GroundedTarget> locate(const std::string& instruction_text,
                                       const Observation& obs) override {
    std::string body = wire_.request_template;
    replace(body, "{{instruction}}", nlohmann::json(instruction_text).dump());
    replace(body, "{{image_b64}}", detail::png_base64(obs));
    replace(body, "{{width}}", std::to_string(obs.width()));
    replace(body, "{{height}}", std::to_string(obs.height()));

    nlohmann::json req = nlohmann::json::parse(body, nullptr, false);
    if (req.is_discarded())
      throw Error(errc::config, "grounder request template produced malformed JSON");
    nlohmann::json res = detail::post_json(cfg_, req);

    nlohmann::json::json_pointer xp(wire_.x_pointer), yp(wire_.y_pointer);
    if (!res.contains(xp) || !res.contains(yp) || res.at(xp).is_null() || res.at(yp).is_null())
      return std::nullopt;
    GroundedTarget t;
    t.point = Point{res.at(xp).get<int>(), res.at(yp).get<int>()};
    t.raw_response = res.dump();
    return t;
  }

 private:
  static void replace(std::string& s, const std::string& from, const std::string& to) {
    size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
      s.replace(pos, from.size(), to);
      pos += to.size();
    }
  }

  EndpointConfig cfg_;
  GrounderWire wire_;
};

// Judge endpoint. Request: {"action", "before_png_b64", "after_png_b64"};
// the action text carries the expected-outcome clause. Response:
// {"verdict": "yes"|"no", "rationale": "..."}.
class HttpJudge : public JudgeInterface {
 public:
  explicit HttpJudge(EndpointConfig cfg) : cfg_(std::move(cfg)) {}

  JudgeResponse judge(const std::string& action_text, const Observation& before,
                      const Observation& after) override {
    nlohmann::json body;
    body["model"] = cfg_.model;
    body["action"] = action_text;
    body["before_png_b64"] = detail::png_base64(before);
    body["after_png_b64"] = detail::png_base64(after);
    nlohmann::json res = detail::post_json(cfg_, body);
    if (!res.contains("verdict") || !res["verdict"].is_string())
      throw Error(errc::backend, "judge response lacks \"verdict\"");
    std::string v = res["verdict"].get<std::string>();
    if (v != "yes" && v != "no")
      throw Error(errc::backend, "judge verdict must be yes or no, got \"" + v + "\"");
    return JudgeResponse{v == "yes", res.value("rationale", "")};
  }

 private:
  EndpointConfig cfg_;
};

}  // namespace demoflow
