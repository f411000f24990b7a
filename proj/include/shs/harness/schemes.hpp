#pragma once

#include "shs/baseline/baseline.hpp"
#include "shs/core/model.hpp"
#include "shs/core/noise.hpp"
#include "shs/project/projection.hpp"
#include "shs/splitflow/flows.hpp"

#include <optional>
#include <string>
#include <vector>

namespace shs {

enum class SchemeId { SesSp1, SesSp2, Midpoint, SymplecticEuler };

/// "ses-sp-1", "ses-sp-2", "midpoint", "sympeuler".
SchemeId parse_scheme(const std::string& name);
std::string to_string(SchemeId id);
std::vector<SchemeId> parse_scheme_list(const std::string& csv);

/// Noise grids handed to a Stepper carry this many fine intervals per step,
/// so that every scheme, including the half-window Strang composition,
/// reads the same Brownian path.
inline constexpr std::size_t kFinePerStep = 2;

struct SchemeOptions {
  /// gamma_r for r = 0..m (SES-SP only); empty means zero.
  std::vector<double> gammas;
  ProjectionConfig projection;
  ImplicitSolverConfig implicit;
  bool fuse_proportional_channels = false;
};

/// Uniform one-step interface over the projected split schemes and the
/// baselines. Holds scratch state; use one instance per thread.
class Stepper {
 public:
  Stepper(SchemeId id, const HamiltonianModel& model, SchemeOptions options = {});

  SchemeId id() const { return id_; }
  bool projected() const { return composer_.has_value(); }

  /// Advances z over step n of a grid whose steps span fine_per_step fine
  /// intervals. `report` is filled for projected schemes.
  PhaseState step(const PhaseState& z, const NoiseGrid& grid, std::size_t fine_per_step, std::size_t n,
                  ProjectionReport* report = nullptr);

  /// Every whole step of the grid.
  PhaseState run(const PhaseState& z0, const NoiseGrid& grid, std::size_t fine_per_step = kFinePerStep);

 private:
  SchemeId id_;
  const HamiltonianModel* model_;
  SchemeOptions options_;
  std::optional<Composer> composer_;
  StepIncrements inc_;
};

}  // namespace shs
