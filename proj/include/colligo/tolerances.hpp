#pragma once

#include <cstdint>

namespace colligo {

/// Numerical knobs threaded explicitly through every operation.
struct Tolerances {
  double residual = 1e-8;
  double rank = 1e-9;
  int taylor_order = 8;
  int sample_budget = 40;
};

}  // namespace colligo
