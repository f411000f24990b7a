#include "shs/harness/schemes.hpp"

#include <sstream>
#include <stdexcept>

namespace shs {

SchemeId parse_scheme(const std::string& name) {
  if (name == "ses-sp-1") return SchemeId::SesSp1;
  if (name == "ses-sp-2") return SchemeId::SesSp2;
  if (name == "midpoint") return SchemeId::Midpoint;
  if (name == "sympeuler") return SchemeId::SymplecticEuler;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected ses-sp-1, ses-sp-2, midpoint or sympeuler)");
}

std::string to_string(SchemeId id) {
  switch (id) {
    case SchemeId::SesSp1: return "ses-sp-1";
    case SchemeId::SesSp2: return "ses-sp-2";
    case SchemeId::Midpoint: return "midpoint";
    case SchemeId::SymplecticEuler: return "sympeuler";
  }
  return "?";
}

std::vector<SchemeId> parse_scheme_list(const std::string& csv) {
  std::vector<SchemeId> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_scheme(item));
  }
  if (out.empty()) throw std::invalid_argument("empty scheme list");
  return out;
}

Stepper::Stepper(SchemeId id, const HamiltonianModel& model, SchemeOptions options)
    : id_(id), model_(&model), options_(std::move(options)) {
  options_.projection.validate();
  options_.implicit.validate();
  if (id_ == SchemeId::SesSp1 || id_ == SchemeId::SesSp2) {
    auto recipe = id_ == SchemeId::SesSp1 ? CompositionRecipe::lie(options_.gammas)
                                          : CompositionRecipe::strang(options_.gammas);
    recipe.fuse_proportional_channels = options_.fuse_proportional_channels;
    composer_.emplace(model, std::move(recipe));
  } else if (id_ == SchemeId::SymplecticEuler && model.noise_channels() != 1) {
    throw std::invalid_argument("sympeuler needs a model with exactly one noise channel");
  }
}

PhaseState Stepper::step(const PhaseState& z, const NoiseGrid& grid, std::size_t fine_per_step, std::size_t n,
                         ProjectionReport* report) {
  if (composer_) {
    composer_->load_step(grid, fine_per_step, n);
    auto res = projection_step(*composer_, z, options_.projection);
    if (report) *report = std::move(res.report);
    return std::move(res.z);
  }
  if (grid.noise_channels() != model_->noise_channels()) {
    throw std::invalid_argument("Stepper: grid channel count differs from model");
  }
  if (n >= step_count(grid, fine_per_step)) throw std::out_of_range("Stepper: step beyond grid");
  inc_.delta.resize(grid.noise_channels() + 1);
  inc_.delta[0] = static_cast<double>(fine_per_step) * grid.dt_fine();
  for (std::size_t r = 1; r < inc_.delta.size(); ++r) {
    inc_.delta[r] = grid.window_sum(r, n * fine_per_step, fine_per_step);
  }
  if (id_ == SchemeId::Midpoint) return midpoint_step(*model_, z, inc_, options_.implicit);
  return symplectic_euler_step(*model_, z, inc_, options_.implicit);
}

PhaseState Stepper::run(const PhaseState& z0, const NoiseGrid& grid, std::size_t fine_per_step) {
  const std::size_t steps = step_count(grid, fine_per_step);
  PhaseState z = z0;
  for (std::size_t n = 0; n < steps; ++n) {
    try {
      z = step(z, grid, fine_per_step, n);
    } catch (const StepFailure&) {
      throw;
    } catch (const NoConvergence& e) {
      throw StepFailure(e, n);
    }
  }
  return z;
}

}  // namespace shs
