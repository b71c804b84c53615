#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "bsp/geometry.hpp"
#include "bsp/rng.hpp"

namespace bsp {

class DirectionWeight;

struct MixtureComponent;

// The prior weight omega(theta) over cut directions. Arguments are reduced
// modulo pi before evaluation.
//
//   Uniform      omega = 1 on (0, pi]; block measure is the perimeter.
//   AxisAligned  omega = 1 at {pi/2, pi} only (the Mondrian special case).
//   Custom       a user function with a declared supremum.
//   Mixed        sum_m C_m * omega_m.
class DirectionWeight {
 public:
  enum class Kind { kUniform, kAxisAligned, kCustom, kMixed };

  static DirectionWeight uniform();
  static DirectionWeight axis_aligned();
  static DirectionWeight custom(std::function<double(double)> omega, double supremum);
  static DirectionWeight mixed(std::vector<MixtureComponent> components);

  Kind kind() const { return kind_; }
  // Custom only.
  double supremum() const { return supremum_; }
  double evaluate(double theta) const;
  // Mixed only.
  const std::vector<MixtureComponent>& components() const;

 private:
  explicit DirectionWeight(Kind kind) : kind_(kind) {}

  Kind kind_;
  std::function<double(double)> omega_;
  double supremum_ = 0.0;
  std::shared_ptr<const std::vector<MixtureComponent>> components_;
};

struct MixtureComponent {
  DirectionWeight weight;
  double c = 1.0;
};

struct CutSample {
  CutLine cut;
  int trials = 1;
  std::optional<std::size_t> component;
};

struct DirectionSample {
  double theta = M_PI;
  int trials = 1;
  std::optional<std::size_t> component;
};

// c(poly) = integral of omega(theta) |l(theta)| over (0, pi], with atoms for
// AxisAligned. Uniform is the perimeter in closed form.
double block_measure(const ConvexPolygon& poly, const DirectionWeight& w);

// |l(pi/2)| + |l(pi)|.
double axis_measure(const ConvexPolygon& poly);

// Same integral evaluated by quadrature for every kind that has a density.
// Used to cross-check the closed forms.
double block_measure_by_quadrature(const ConvexPolygon& poly, const DirectionWeight& w);

DirectionSample sample_direction(const ConvexPolygon& poly, const DirectionWeight& w,
                                 Rng& rng);

CutSample sample_cut(const ConvexPolygon& poly, const DirectionWeight& w, Rng& rng);

// Normalised law of theta: omega(theta)|l(theta)| / c(poly). At the atoms of an
// AxisAligned component the returned value is the atom's probability mass;
// for mixtures it is the mixture of the components' values.
double direction_density(const ConvexPolygon& poly, const DirectionWeight& w, double theta);

// The two parts of direction_density: the absolutely continuous density and
// the point mass sitting exactly at theta (non-zero only at atoms).
double continuous_density(const ConvexPolygon& poly, const DirectionWeight& w, double theta);
double atom_mass(const ConvexPolygon& poly, const DirectionWeight& w, double theta);

// Atom locations carried by the weight (pi/2 and pi when an AxisAligned
// component is present).
std::vector<double> atoms(const DirectionWeight& w);

}  // namespace bsp
