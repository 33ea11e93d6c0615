#pragma once

#include <stdexcept>
#include <string>

namespace demoflow {

enum class errc {
  parse,             // malformed input text
  schema,            // well-formed input, wrong structure
  validation,        // value violates a documented invariant
  config,            // bad configuration / usage
  io,                // filesystem failure
  backend,           // remote/pluggable backend failed or timed out
  grounding_miss,    // grounder found no target (retryable)
  grounding_invalid, // grounder returned an out-of-bounds point
  contract,          // caller violated a precondition
  domain,            // argument outside the mathematical domain
  budget,            // global execution budget exhausted
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::parse: return "parse";
    case errc::schema: return "schema";
    case errc::validation: return "validation";
    case errc::config: return "config";
    case errc::io: return "io";
    case errc::backend: return "backend";
    case errc::grounding_miss: return "grounding-miss";
    case errc::grounding_invalid: return "grounding-invalid";
    case errc::contract: return "contract";
    case errc::domain: return "domain";
    case errc::budget: return "budget";
  }
  return "unknown";
}

}  // namespace demoflow
