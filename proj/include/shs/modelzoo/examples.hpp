#pragma once

#include "shs/core/invariants.hpp"
#include "shs/core/model.hpp"
#include "shs/core/types.hpp"

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace shs {

struct NamedFunctional {
  std::string name;
  std::function<double(const PhaseState&)> eval;
};

/// Map between the canonical (X, Y) coordinates and the auxiliary y-space
/// variables in which a Casimir is written.
struct CoordinateTransform {
  std::function<Vector(const PhaseState&)> forward;
  std::function<PhaseState(const Vector&)> inverse;
};

struct ExampleSpec {
  std::string name;
  HamiltonianModel model;
  PhaseState z0;
  std::vector<NamedFunctional> invariants;
  std::optional<CoordinateTransform> transform;
  std::optional<LinearInvariant> linear;
  std::optional<QuadraticInvariant> quadratic;
  std::map<std::string, double> params;

  /// Throws std::invalid_argument listing the known names on a miss.
  const NamedFunctional& invariant(const std::string& name) const;
  std::vector<std::string> invariant_names() const;
};

/// H0 = (X^2 + 1)(Y^2 + 1) / 2, H1 = c H0, z0 = (0, -3).
ExampleSpec make_example1(double c);

struct LotkaVolterraParams {
  double a = -2.0;
  double b = -1.0;
  double v = -0.5;
  double omega = 1.0;
  double mu = 2.0;
  std::array<double, 3> y0{1.0, 1.9, 0.5};
};

/// Lotka-Volterra system in canonical coordinates. The original system reads
/// d(X, Y) = [0 -1; 1 0] grad H (dt + c o dW), so H0 = -H and H1 = c H0.
ExampleSpec make_example2(double c, const LotkaVolterraParams& p = {});

/// H0 = exp(f sin g), f = (2 X1 - 3 Y1) / 10, g = (X2^2 + 2 Y2^2) / 4,
/// H1 = c H0. f and g are the linear and quadratic invariants.
ExampleSpec make_example3(double c);

/// Stochastic rigid body reduced to one canonical pair. Oriented like
/// Example 2: H0 = -H with H the kinetic energy in (X, Y), H1 = c H0.
ExampleSpec make_example4(double c, const std::array<double, 3>& y0 = {0.70710678118654752, 0.70710678118654752, 0.0});

/// Example 4 moments of inertia.
struct RigidBodyInertia {
  double i1, i2, i3;
};
RigidBodyInertia rigid_body_inertia();

/// Registry for "ex1".."ex4" with default parameters.
ExampleSpec make_example(const std::string& name, double c);
double default_noise_scale(const std::string& name);
std::vector<std::string> example_names();

}  // namespace shs
