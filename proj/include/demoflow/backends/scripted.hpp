#pragma once

#include <atomic>
#include <string>
#include <vector>

#include "demoflow/errors.hpp"
#include "demoflow/grounder.hpp"
#include "demoflow/instructor.hpp"
#include "demoflow/verifier.hpp"

namespace demoflow {

// Deterministic text backend replaying a fixed list of responses in call
// order. An empty script echoes a stable function of the prompt, so repeated
// runs over the same inputs produce identical output.
class ScriptedTextGen : public TextGenBackendInterface {
 public:
  ScriptedTextGen() = default;
  explicit ScriptedTextGen(std::vector<std::string> responses)
      : responses_(std::move(responses)) {}

  std::string generate(const std::vector<PromptPart>& prompt) override {
    size_t n = calls_++;
    if (!responses_.empty()) {
      if (n >= responses_.size())
        throw Error(errc::backend, "scripted backend exhausted after " +
                                       std::to_string(responses_.size()) + " calls");
      return responses_[n];
    }
    uint64_t h = 1469598103934665603ull;
    for (const auto& p : prompt) {
      const std::string& s = p.kind == PromptPart::Kind::text ? p.text : p.image.digest;
      for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
      }
    }
    return "echo-" + std::to_string(h);
  }

  std::string model_id() const override { return "scripted"; }
  size_t call_count() const { return calls_; }

 private:
  std::vector<std::string> responses_;
  std::atomic<size_t> calls_{0};
};

// Counting wrappers for asserting which backends a run actually consulted.
class CountingJudge : public JudgeInterface {
 public:
  explicit CountingJudge(JudgeInterface& inner) : inner_(inner) {}
  JudgeResponse judge(const std::string& a, const Observation& b,
                      const Observation& c) override {
    ++calls_;
    return inner_.judge(a, b, c);
  }
  size_t call_count() const { return calls_; }

 private:
  JudgeInterface& inner_;
  std::atomic<size_t> calls_{0};
};

class CountingGrounder : public GroundingInterface {
 public:
  explicit CountingGrounder(GroundingInterface& inner) : inner_(inner) {}
  std::optional<GroundedTarget> locate(const std::string& text,
                                       const Observation& obs) override {
    ++calls_;
    return inner_.locate(text, obs);
  }
  size_t call_count() const { return calls_; }

 private:
  GroundingInterface& inner_;
  std::atomic<size_t> calls_{0};
};

}  // namespace demoflow
