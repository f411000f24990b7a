#pragma once

#include "shs/core/model.hpp"
#include "shs/core/noise.hpp"
#include "shs/core/types.hpp"

namespace shs {

struct ImplicitSolverConfig {
  /// Max-norm bound on the residual of the implicit equations.
  double tol = 1e-12;
  int max_iter = 50;
  /// Relative forward-difference step for Newton Jacobians.
  double fd_step = 1e-7;

  void validate() const;
};

/// Stochastic midpoint rule
///   X' = X + sum_r dH_r/dY(M) delta[r],  Y' = Y - sum_r dH_r/dX(M) delta[r]
/// with M = (Z + Z') / 2. Newton with a forward-difference Jacobian started
/// from the explicit Euler predictor.
PhaseState midpoint_step(const HamiltonianModel& model, const PhaseState& z, const StepIncrements& inc,
                         const ImplicitSolverConfig& cfg = {});

/// Symplectic Euler for one noise channel, derivatives at (X', Y) and the
/// correction terms
///   X: -1/2 (H1_YY H1_X - 1/2 H1_YX H1_Y) dt
///   Y: -1/2 (H1_XX H1_Y - 1/2 H1_YX H1_X) dt
/// X' solves its implicit equation by Newton; Y' follows explicitly.
PhaseState symplectic_euler_step(const HamiltonianModel& model, const PhaseState& z, const StepIncrements& inc,
                                 const ImplicitSolverConfig& cfg = {});

/// H_1 Hessian blocks, analytic when the model has them, otherwise central
/// differences of the gradient with step 1e-6 (1 + ||(x, y)||).
void noise_hessian_blocks(const HamiltonianModel& model, VecIn x, VecIn y, Matrix& xx, Matrix& yy, Matrix& yx);

}  // namespace shs
