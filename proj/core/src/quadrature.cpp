#include "bsp/quadrature.hpp"

#include <cmath>

#include "bsp/error.hpp"

namespace bsp {
namespace {

struct Panel {
  double a, fa, m, fm, b, fb, whole;
};

double refine(const std::function<double(double)>& f, const Panel& p, double tol,
              int depth, int max_depth) {
  const double lm = 0.5 * (p.a + p.m);
  const double rm = 0.5 * (p.m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (p.m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
  const double right = (p.b - p.m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
  const double delta = left + right - p.whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth >= max_depth) {
    fail(ErrorKind::kQuadratureFailure, "adaptive Simpson exceeded its depth limit");
  }
  return refine(f, {p.a, p.fa, lm, flm, p.m, p.fm, left}, 0.5 * tol, depth + 1, max_depth) +
         refine(f, {p.m, p.fm, rm, frm, p.b, p.fb, right}, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        SimpsonOptions options) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // A coarse pass fixes the scale for the relative tolerance; a zero estimate
  // falls back to an absolute tolerance of the same size.
  double scale = std::abs(whole);
  {
    double coarse = 0.0;
    constexpr int kProbe = 16;
    for (int i = 0; i <= kProbe; ++i) {
      coarse += std::abs(f(a + (b - a) * i / kProbe));
    }
    scale = std::max(scale, coarse / (kProbe + 1) * std::abs(b - a));
  }
  const double tol = options.relative_tolerance * (scale > 0.0 ? scale : 1.0);
  return refine(f, {a, fa, m, fm, b, fb, whole}, tol, 0, options.max_depth);
}

}  // namespace bsp
