#pragma once

#include <vector>

namespace prederr {

// Linear decision rule: label 1 iff w.v + b > 0.
struct LinearHypothesis {
  std::vector<double> w;
  double b = 0.0;

  friend bool operator==(const LinearHypothesis &, const LinearHypothesis &) = default;
};

} // namespace prederr
