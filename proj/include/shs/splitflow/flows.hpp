#pragma once

#include "shs/core/model.hpp"
#include "shs/core/noise.hpp"
#include "shs/core/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace shs {

enum class FlowId { F1, F2, F3 };

std::string to_string(FlowId id);

struct Stage {
  FlowId flow = FlowId::F1;
  Fraction fraction;
};

/// Ordered list of flow stages. Stages execute left to right (the leftmost
/// stage acts first). The i-th occurrence of a flow consumes the i-th
/// consecutive window of its family's fraction sequence inside the step.
struct CompositionRecipe {
  std::vector<Stage> stages;
  /// gamma_r for r = 0..m; an empty list means all zero.
  std::vector<double> gammas;
  /// Evaluate one gradient per F1/F2 stage and scale it when the model
  /// carries a proportionality hint. Changes rounding, so off by default.
  bool fuse_proportional_channels = false;

  /// Throws std::invalid_argument unless every used family's fractions sum
  /// to one and gammas is empty or has m+1 entries.
  void validate(std::size_t noise_channels) const;

  /// Fine intervals a step must span so that every window is aligned: the
  /// lcm of the stage denominators.
  std::size_t substeps() const;

  double gamma(std::size_t r) const { return r < gammas.size() ? gammas[r] : 0.0; }

  /// [F1(1), F2(1), F3(1)]
  static CompositionRecipe lie(std::vector<double> gammas = {});
  /// [F1(1/2), F2(1/2), F3(1), F2(1/2), F1(1/2)]
  static CompositionRecipe strang(std::vector<double> gammas = {});
};

ExtendedState flow_f1(const HamiltonianModel& model, const ExtendedState& s, const StepIncrements& inc);
ExtendedState flow_f2(const HamiltonianModel& model, const ExtendedState& s, const StepIncrements& inc);
ExtendedState flow_f3(const std::vector<double>& gammas, const ExtendedState& s, const StepIncrements& inc);

/// In-place one-step map for a recipe with the noise of one step frozen.
/// Holds scratch buffers, so one instance must not be shared across threads.
class Composer {
 public:
  Composer(const HamiltonianModel& model, CompositionRecipe recipe);

  const CompositionRecipe& recipe() const { return recipe_; }
  const HamiltonianModel& model() const { return *model_; }

  /// Freezes the increments of step `step` of a grid whose steps span
  /// fine_per_step fine intervals (must be a multiple of recipe().substeps()).
  void load_step(const NoiseGrid& grid, std::size_t fine_per_step, std::size_t step);
  /// Freezes explicit per-stage increments (one entry per stage).
  void load_stage_increments(std::vector<StepIncrements> per_stage);
  const std::vector<StepIncrements>& stage_increments() const { return stage_inc_; }

  /// Applies the frozen step to a packed (X, U, Y, V) vector.
  void apply(Vector& packed);
  void apply(ExtendedState& s) { apply(s.packed()); }

 private:
  void apply_exchange(Vector& packed, std::size_t stage, bool first);
  void update_rotations();

  struct Window {
    Fraction start;
    Fraction length;
  };

  const HamiltonianModel* model_;
  CompositionRecipe recipe_;
  /// Position of each stage's window inside the step.
  std::vector<Window> windows_;
  std::vector<StepIncrements> stage_inc_;
  std::vector<double> cos_theta_, sin_theta_;
  Vector gx_, gy_, sum_gx_, sum_gy_;
};

/// One step of the unprojected composition.
ExtendedState compose(const CompositionRecipe& recipe, const HamiltonianModel& model, const ExtendedState& s,
                      const NoiseGrid& grid, std::size_t step, std::size_t fine_per_step = 0);

/// Map on a packed vector (q, p) with q, p of equal length.
using PackedMap = std::function<Vector(const Vector&)>;

/// max |(M^T J M - J)_ij| with M the central-difference Jacobian of `map`
/// at z and J = [0 I; -I 0]. Differences divide by the representable
/// perturbation actually applied.
double symplectic_residual(const PackedMap& map, const Vector& z, double fd_step);

/// Same for an extended map; (X, U, Y, V) packing makes J the matrix of
/// dX^dY + dU^dV.
double symplectic_residual_extended(const std::function<ExtendedState(const ExtendedState&)>& map,
                                    const ExtendedState& s, double fd_step);

}  // namespace shs
