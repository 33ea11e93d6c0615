#pragma once

#include <memory>

#include "demoflow/executor.hpp"
#include "demoflow/sim/state.hpp"

namespace demoflow::sim {

// EnvironmentDriverInterface over a shared simulator session. All acceptance
// runs use this driver; pacing is a no-op because the sim is instantaneous.
class SimDriver : public EnvironmentDriverInterface {
 public:
  explicit SimDriver(std::shared_ptr<SimSession> session) : session_(std::move(session)) {}

  void apply(const Primitive& p) override { session_->apply(p); }
  Observation capture() override { return session_->observe(); }
  Size screen_size() const override { return session_->world().screen_size; }

  SimSession& session() { return *session_; }

 private:
  std::shared_ptr<SimSession> session_;
};

}  // namespace demoflow::sim
