#pragma once

#include <functional>

namespace bsp {

struct SimpsonOptions {
  double relative_tolerance = 1e-9;
  int max_depth = 40;
};

// Adaptive Simpson quadrature of f over [a, b] with Richardson correction.
// Throws Error(kQuadratureFailure) when an interval would need refinement
// beyond max_depth to meet its share of the tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        SimpsonOptions options = {});

}  // namespace bsp
