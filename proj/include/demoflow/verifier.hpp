#pragma once

#include <string>

#include "demoflow/errors.hpp"
#include "demoflow/image.hpp"
#include "demoflow/instructions.hpp"
#include "demoflow/run_log.hpp"

namespace demoflow {

struct JudgeResponse {
  bool success = false;
  std::string rationale;
};

// Pluggable judge deciding from before/after screenshots whether an action
// had its expected effect. The action text carries the expected-outcome
// clause the instructor wrote.
class JudgeInterface {
 public:
  virtual ~JudgeInterface() = default;
  virtual JudgeResponse judge(const std::string& action_text, const Observation& before,
                              const Observation& after) = 0;
};

struct Verdict {
  VerifyMark mark = VerifyMark::no;
  std::string rationale;
};

// Text input and key presses are not visually verified.
inline bool should_verify(const InstructionStep& step) {
  return step.action_class == ActionClass::pointer;
}

inline Verdict verify(const InstructionStep& step, const Observation& before,
                      const Observation& after, JudgeInterface& judge) {
  if (!should_verify(step))
    throw Error(errc::contract, "verify() called for a non-verifiable step");
  if (before.width() != after.width() || before.height() != after.height())
    throw Error(errc::contract, "before/after observations differ in size");
  JudgeResponse r;
  try {
    r = judge.judge(step.action_text, before, after);
  } catch (const std::exception& e) {
    throw Error(errc::backend, std::string("verification unavailable: ") + e.what());
  }
  return Verdict{r.success ? VerifyMark::yes : VerifyMark::no, r.rationale};
}

}  // namespace demoflow
