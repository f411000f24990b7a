#pragma once

#include "shs/core/model.hpp"
#include "shs/core/types.hpp"

#include <cstdint>

namespace shs {

struct GradientCheckOptions {
  std::size_t samples = 100;
  double fd_step = 1e-5;
  double tol = 1e-6;
  /// Samples are drawn uniformly from the box center +- radius.
  PhaseState center;
  double radius = 1.0;
  std::uint64_t seed = 20240101;
};

struct GradientCheckReport {
  bool passed = true;
  /// max over samples, channels and components of |fd - g| / max(1, |g|).
  double worst_deviation = 0.0;
  std::size_t worst_channel = 0;
  PhaseState worst_point;
  /// Same measure for the optional analytic noise Hessian (0 when absent).
  double worst_hessian_deviation = 0.0;
};

/// Compares the analytic gradients of every H_r with central differences of
/// H_r at random points. Report only; never throws on mismatch.
GradientCheckReport verify_gradients(const HamiltonianModel& model, const GradientCheckOptions& options);

}  // namespace shs
