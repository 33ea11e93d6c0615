#pragma once

#include <span>

#include "demoflow/errors.hpp"

namespace demoflow {

// Chained success probability of a sequence of independent steps: the product
// of the per-step probabilities. The empty product is 1.0.
inline double chain_success_probability(std::span<const double> probs) {
  double product = 1.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0))
      throw Error(errc::domain, "probability outside [0, 1]");
    product *= p;
  }
  return product;
}

}  // namespace demoflow
