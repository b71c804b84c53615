#include "bsp/measure.hpp"

#include <algorithm>
#include <cmath>

#include "bsp/error.hpp"
#include "bsp/quadrature.hpp"

namespace bsp {
namespace {

constexpr double kHalfPi = M_PI / 2.0;
constexpr int kMaxRejectionTrials = 10'000'000;

bool is_atom(double theta) {
  const double r = reduce_angle(theta);
  return std::abs(r - kHalfPi) < 1e-12 || std::abs(r - M_PI) < 1e-12;
}

double length_at(const ConvexPolygon& poly, double theta) {
  return project(poly, theta).length();
}

std::vector<double> component_masses(const ConvexPolygon& poly, const DirectionWeight& w) {
  std::vector<double> masses;
  masses.reserve(w.components().size());
  for (const MixtureComponent& comp : w.components()) {
    masses.push_back(comp.c * block_measure(poly, comp.weight));
  }
  return masses;
}

}  // namespace

DirectionWeight DirectionWeight::uniform() { return DirectionWeight(Kind::kUniform); }

DirectionWeight DirectionWeight::axis_aligned() { return DirectionWeight(Kind::kAxisAligned); }

DirectionWeight DirectionWeight::custom(std::function<double(double)> omega, double supremum) {
  if (!omega) fail(ErrorKind::kInvalidArgument, "custom weight needs a function");
  if (!(supremum > 0.0) || !std::isfinite(supremum)) {
    fail(ErrorKind::kInvalidArgument, "custom weight supremum must be positive and finite");
  }
  DirectionWeight w(Kind::kCustom);
  w.omega_ = std::move(omega);
  w.supremum_ = supremum;
  return w;
}

DirectionWeight DirectionWeight::mixed(std::vector<MixtureComponent> components) {
  // A single component is allowed: it rescales that component's measure.
  if (components.empty()) {
    fail(ErrorKind::kInvalidArgument, "a mixed weight needs at least one component");
  }
  bool any_positive = false;
  for (const MixtureComponent& c : components) {
    if (!(c.c >= 0.0) || !std::isfinite(c.c)) {
      fail(ErrorKind::kInvalidArgument, "mix constants must be finite and non-negative");
    }
    any_positive = any_positive || c.c > 0.0;
  }
  if (!any_positive) fail(ErrorKind::kInvalidArgument, "all mix constants are zero");
  DirectionWeight w(Kind::kMixed);
  w.components_ = std::make_shared<const std::vector<MixtureComponent>>(std::move(components));
  return w;
}

const std::vector<MixtureComponent>& DirectionWeight::components() const {
  if (kind_ != Kind::kMixed) fail(ErrorKind::kInvalidArgument, "not a mixed weight");
  return *components_;
}

double DirectionWeight::evaluate(double theta) const {
  const double r = reduce_angle(theta);
  switch (kind_) {
    case Kind::kUniform:
      return 1.0;
    case Kind::kAxisAligned:
      return is_atom(r) ? 1.0 : 0.0;
    case Kind::kCustom:
      return omega_(r);
    case Kind::kMixed: {
      double total = 0.0;
      for (const MixtureComponent& c : *components_) total += c.c * c.weight.evaluate(r);
      return total;
    }
  }
  return 0.0;
}

double axis_measure(const ConvexPolygon& poly) {
  return length_at(poly, kHalfPi) + length_at(poly, M_PI);
}

double block_measure(const ConvexPolygon& poly, const DirectionWeight& w) {
  switch (w.kind()) {
    case DirectionWeight::Kind::kUniform:
      return perimeter(poly);
    case DirectionWeight::Kind::kAxisAligned:
      return axis_measure(poly);
    case DirectionWeight::Kind::kCustom:
      return block_measure_by_quadrature(poly, w);
    case DirectionWeight::Kind::kMixed: {
      double total = 0.0;
      for (double m : component_masses(poly, w)) total += m;
      return total;
    }
  }
  return 0.0;
}

double block_measure_by_quadrature(const ConvexPolygon& poly, const DirectionWeight& w) {
  switch (w.kind()) {
    case DirectionWeight::Kind::kAxisAligned:
      return axis_measure(poly);
    case DirectionWeight::Kind::kMixed: {
      double total = 0.0;
      for (const MixtureComponent& c : w.components()) {
        total += c.c * block_measure_by_quadrature(poly, c.weight);
      }
      return total;
    }
    case DirectionWeight::Kind::kUniform:
    case DirectionWeight::Kind::kCustom:
      break;
  }
  auto integrand = [&](double theta) {
    const double omega = w.evaluate(theta);
    if (!(omega >= 0.0) || !std::isfinite(omega)) {
      fail(ErrorKind::kInvalidArgument, "direction weight must be finite and non-negative");
    }
    return omega * length_at(poly, theta);
  };
  // |l(theta)| has kinks at edge normals; pi/2 is one for every rectangle.
  return adaptive_simpson(integrand, 0.0, kHalfPi) + adaptive_simpson(integrand, kHalfPi, M_PI);
}

DirectionSample sample_direction(const ConvexPolygon& poly, const DirectionWeight& w,
                                 Rng& rng) {
  switch (w.kind()) {
    case DirectionWeight::Kind::kUniform: {
      // Proposal g = 1/pi with M = pi/2; the acceptance ratio is
      // 2|l(theta)|/PE, which is at most 1 for a convex polygon.
      const double pe = perimeter(poly);
      for (int trials = 1; trials <= kMaxRejectionTrials; ++trials) {
        const double theta = M_PI * rng.uniform();
        if (rng.uniform() * pe < 2.0 * length_at(poly, theta)) return {theta, trials, {}};
      }
      break;
    }
    case DirectionWeight::Kind::kAxisAligned: {
      const double vertical = length_at(poly, kHalfPi);
      const double horizontal = length_at(poly, M_PI);
      const double theta = rng.uniform() * (vertical + horizontal) < vertical ? kHalfPi : M_PI;
      return {theta, 1, {}};
    }
    case DirectionWeight::Kind::kCustom: {
      const double envelope = w.supremum() * diameter(poly);
      for (int trials = 1; trials <= kMaxRejectionTrials; ++trials) {
        const double theta = M_PI * rng.uniform();
        const double omega = w.evaluate(theta);
        if (!(omega >= 0.0)) {
          fail(ErrorKind::kEnvelopeViolation, "custom weight is negative at theta = " +
                                                  std::to_string(theta));
        }
        const double ratio = omega * length_at(poly, theta) / envelope;
        if (ratio > 1.0 + 1e-12 || omega > w.supremum()) {
          fail(ErrorKind::kEnvelopeViolation,
               "declared supremum is exceeded at theta = " + std::to_string(theta));
        }
        if (rng.uniform() < ratio) return {theta, trials, {}};
      }
      break;
    }
    case DirectionWeight::Kind::kMixed: {
      const std::vector<double> masses = component_masses(poly, w);
      const std::size_t m = rng.categorical(masses);
      DirectionSample inner = sample_direction(poly, w.components()[m].weight, rng);
      inner.component = m;
      return inner;
    }
  }
  fail(ErrorKind::kEnvelopeViolation, "rejection sampler did not accept within the trial cap");
}

CutSample sample_cut(const ConvexPolygon& poly, const DirectionWeight& w, Rng& rng) {
  const DirectionSample dir = sample_direction(poly, w, rng);
  const ProjectionSegment seg = project(poly, dir.theta);
  double offset;
  do {
    offset = seg.lo + seg.length() * rng.uniform();
  } while (!(seg.lo < offset && offset < seg.hi));
  return {{dir.theta, offset}, dir.trials, dir.component};
}

double continuous_density(const ConvexPolygon& poly, const DirectionWeight& w, double theta) {
  switch (w.kind()) {
    case DirectionWeight::Kind::kUniform:
      return length_at(poly, theta) / perimeter(poly);
    case DirectionWeight::Kind::kAxisAligned:
      return 0.0;
    case DirectionWeight::Kind::kCustom: {
      const double c = block_measure(poly, w);
      return c > 0.0 ? w.evaluate(theta) * length_at(poly, theta) / c : 0.0;
    }
    case DirectionWeight::Kind::kMixed: {
      const std::vector<double> masses = component_masses(poly, w);
      double total = 0.0;
      for (double m : masses) total += m;
      double value = 0.0;
      for (std::size_t k = 0; k < masses.size(); ++k) {
        if (masses[k] > 0.0) {
          value += masses[k] / total * continuous_density(poly, w.components()[k].weight, theta);
        }
      }
      return value;
    }
  }
  return 0.0;
}

double atom_mass(const ConvexPolygon& poly, const DirectionWeight& w, double theta) {
  switch (w.kind()) {
    case DirectionWeight::Kind::kAxisAligned:
      return is_atom(theta) ? length_at(poly, theta) / axis_measure(poly) : 0.0;
    case DirectionWeight::Kind::kMixed: {
      const std::vector<double> masses = component_masses(poly, w);
      double total = 0.0;
      for (double m : masses) total += m;
      double value = 0.0;
      for (std::size_t k = 0; k < masses.size(); ++k) {
        if (masses[k] > 0.0) {
          value += masses[k] / total * atom_mass(poly, w.components()[k].weight, theta);
        }
      }
      return value;
    }
    case DirectionWeight::Kind::kUniform:
    case DirectionWeight::Kind::kCustom:
      return 0.0;
  }
  return 0.0;
}

double direction_density(const ConvexPolygon& poly, const DirectionWeight& w, double theta) {
  return continuous_density(poly, w, theta) + atom_mass(poly, w, theta);
}

std::vector<double> atoms(const DirectionWeight& w) {
  switch (w.kind()) {
    case DirectionWeight::Kind::kAxisAligned:
      return {kHalfPi, M_PI};
    case DirectionWeight::Kind::kMixed:
      for (const MixtureComponent& c : w.components()) {
        if (!atoms(c.weight).empty()) return {kHalfPi, M_PI};
      }
      return {};
    case DirectionWeight::Kind::kUniform:
    case DirectionWeight::Kind::kCustom:
      return {};
  }
  return {};
}

}  // namespace bsp
