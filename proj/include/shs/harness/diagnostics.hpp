#pragma once

#include "shs/harness/schemes.hpp"
#include "shs/modelzoo/examples.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace shs {

struct CheckResult {
  std::string name;
  /// Measured worst case.
  double value = 0.0;
  /// Pass when value <= threshold.
  double threshold = 0.0;
  bool passed = false;
};

struct SymplecticSampling {
  std::size_t pairs = 50;
  double dt = 1e-2;
  /// States are drawn uniformly from z0 +- radius in every coordinate.
  double radius = 0.2;
  double fd_step = 1e-5;
  /// Uniform restraint constant applied to every channel.
  double gamma = 0.5;
  ProjectionConfig projection{1e-13, 100, true};
  std::uint64_t seed = 1;
};

struct SymplecticSummary {
  /// max |M^T J M - J| over the sampled pairs.
  double max_residual = 0.0;
  /// max ||A xi^{n+1}|| left after the correction.
  double max_kernel_residual = 0.0;
};

/// Finite-difference symplecticity of the projected one-step map of an
/// SES-SP scheme at random (state, noise) pairs. Noise pair k is path k of
/// the seed.
SymplecticSummary projected_symplectic_residual(const ExampleSpec& example, SchemeId scheme,
                                                const SymplecticSampling& sampling);

struct DiagnosticsOptions {
  std::size_t samples = 100;
  SymplecticSampling symplectic{20, 1e-2, 0.2, 1e-5, 0.5, {1e-13, 100, true}, 1};
  /// Invariant drift runs: steps of size symplectic.dt.
  std::size_t invariant_steps = 1000;
  /// Restraint constant of the linear-invariant drift run.
  double linear_gamma = 0.5;
  std::uint64_t seed = 1;
};

/// Invariant and symplecticity suite for one example: derivative checks,
/// proportionality of H1, transform round trips, Casimir identity, the
/// linear-invariant condition, projected-map symplecticity and invariant
/// drift of the projected schemes.
std::vector<CheckResult> run_diagnostics(const ExampleSpec& example, const DiagnosticsOptions& options = {});

}  // namespace shs
