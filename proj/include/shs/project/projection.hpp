#pragma once

#include "shs/core/model.hpp"
#include "shs/core/noise.hpp"
#include "shs/core/types.hpp"
#include "shs/splitflow/flows.hpp"

#include <functional>
#include <string>
#include <vector>

namespace shs {

struct ProjectionConfig {
  /// Stop once ||lambda^{k+1} - lambda^k|| < tol.
  double tol = 1e-12;
  int max_iter = 50;
  /// On failure retry once with Newton on a finite-difference Jacobian.
  bool fallback_full_newton = true;

  void validate() const;
};

struct ProjectionReport {
  Vector lambda;
  /// Evaluations of the extended map spent on the solve.
  int iterations = 0;
  double final_delta = 0.0;
  /// ||A xi~^{n+1}||: copy separation produced by the map before correction.
  double defect_pre = 0.0;
  /// ||A xi^{n+1}||: separation left after correction.
  double residual = 0.0;
  bool used_fallback = false;
};

/// In-place map on a packed extended vector laid out as four equal blocks
/// (q1, q2, p1, p2). A = [I -I 0 0; 0 0 I -I] acts on that layout.
using ExtendedMap = std::function<void(Vector&)>;

/// Solves A F(base + A^T lambda) + 2 lambda = 0 by the simplified Newton
/// iteration lambda <- lambda - (A F(base + A^T lambda) + 2 lambda) / 4 and
/// writes xi^{n+1} = F(base + A^T lambda) + A^T lambda into `out`.
/// Throws NoConvergence when neither the iteration nor the fallback
/// reaches tol.
ProjectionReport solve_symmetric_projection(const ExtendedMap& map, const Vector& base, const ProjectionConfig& cfg,
                                            Vector& out);

ExtendedState lift(const PhaseState& z);
/// Mean of the two copies: (x + u) / 2, (y + v) / 2.
PhaseState restrict_state(const ExtendedState& s);

struct ProjectedStep {
  PhaseState z;
  ProjectionReport report;
};

/// One step of the projected scheme with the composer's frozen increments.
ProjectedStep projection_step(Composer& composer, const PhaseState& z, const ProjectionConfig& cfg);
ProjectedStep projection_step(const CompositionRecipe& recipe, const HamiltonianModel& model, const PhaseState& z,
                              const NoiseGrid& grid, std::size_t step, const ProjectionConfig& cfg,
                              std::size_t fine_per_step = 0);

struct Tracker {
  std::string name;
  std::function<double(const PhaseState&)> eval;
};

struct SimulateOptions {
  /// false: run the bare composition in extended space and report the mean
  /// of the copies.
  bool project = true;
  bool keep_states = true;
  /// Steps per grid step in fine intervals; 0 means recipe.substeps().
  std::size_t fine_per_step = 0;
  /// Number of steps; 0 means every whole step the grid holds.
  std::size_t steps = 0;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<PhaseState> states;
  std::vector<ProjectionReport> reports;
  /// series[k][n]: tracker k at time t[n].
  std::vector<std::vector<double>> series;
  /// Copy separation before / after the correction at each step (index 0
  /// is the initial state, always 0).
  std::vector<double> defect_pre;
  std::vector<double> defect_post;
  PhaseState final_state;
};

/// Thrown by simulate when a step fails; carries the step index.
class StepFailure : public NoConvergence {
 public:
  StepFailure(const NoConvergence& cause, std::size_t step);
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

Trajectory simulate(const CompositionRecipe& recipe, const HamiltonianModel& model, const PhaseState& z0,
                    const NoiseGrid& grid, const std::vector<Tracker>& trackers, const ProjectionConfig& cfg,
                    const SimulateOptions& options = {});

}  // namespace shs
