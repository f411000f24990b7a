#include "shs/harness/diagnostics.hpp"

#include "shs/core/gradient_check.hpp"
#include "shs/harness/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace shs {

namespace {

PhaseState random_near(const PhaseState& center, double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-radius, radius);
  PhaseState z = center;
  for (Eigen::Index i = 0; i < z.dim(); ++i) {
    z.x[i] += u(rng);
    z.y[i] += u(rng);
  }
  return z;
}

CheckResult make_check(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, value <= threshold};
}

std::vector<double> uniform_gammas(const HamiltonianModel& model, double gamma) {
  return std::vector<double>(model.noise_channels() + 1, gamma);
}

double max_abs_series(const TrackResult& r) {
  double worst = 0.0;
  for (const auto& s : r.series) {
    for (double v : s.value) worst = std::max(worst, std::abs(v));
  }
  return worst;
}

}  // namespace

SymplecticSummary projected_symplectic_residual(const ExampleSpec& example, SchemeId scheme,
                                                const SymplecticSampling& sampling) {
  if (scheme != SchemeId::SesSp1 && scheme != SchemeId::SesSp2) {
    throw std::invalid_argument("projected_symplectic_residual needs an SES-SP scheme");
  }
  const auto& model = example.model;
  const auto gammas = uniform_gammas(model, sampling.gamma);
  const CompositionRecipe recipe =
      scheme == SchemeId::SesSp1 ? CompositionRecipe::lie(gammas) : CompositionRecipe::strang(gammas);
  Composer composer(model, recipe);
  std::mt19937_64 rng(sampling.seed);
  SymplecticSummary out;
  for (std::size_t k = 0; k < sampling.pairs; ++k) {
    const PhaseState z = random_near(example.z0, sampling.radius, rng);
    const NoiseGrid grid =
        build_noise_grid(sampling.seed, k, model.noise_channels(), 0.0, sampling.dt, kFinePerStep);
    composer.load_step(grid, kFinePerStep, 0);
    const PackedMap map = [&](const Vector& packed) {
      const auto r = projection_step(composer, PhaseState::from_packed(packed), sampling.projection);
      out.max_kernel_residual = std::max(out.max_kernel_residual, r.report.residual);
      return r.z.packed();
    };
    out.max_residual = std::max(out.max_residual, symplectic_residual(map, z.packed(), sampling.fd_step));
  }
  return out;
}

std::vector<CheckResult> run_diagnostics(const ExampleSpec& example, const DiagnosticsOptions& options) {
  const auto& model = example.model;
  std::vector<CheckResult> out;
  std::mt19937_64 rng(options.seed);

  GradientCheckOptions gopt;
  gopt.samples = options.samples;
  gopt.center = example.z0;
  gopt.radius = options.symplectic.radius;
  gopt.seed = options.seed;
  const auto grad = verify_gradients(model, gopt);
  out.push_back(make_check("gradients", grad.worst_deviation, gopt.tol));
  if (model.has_noise_hessian()) out.push_back(make_check("noise-hessian", grad.worst_hessian_deviation, gopt.tol));

  if (const auto& prop = model.proportionality()) {
    double worst = 0.0;
    for (std::size_t k = 0; k < options.samples; ++k) {
      const PhaseState z = random_near(example.z0, 1.0, rng);
      const double h0 = model.value(0, z.x, z.y);
      for (std::size_t r = 1; r <= model.noise_channels(); ++r) {
        worst = std::max(worst, std::abs(model.value(r, z.x, z.y) - (*prop)[r] * h0));
      }
    }
    out.push_back(make_check("proportionality", worst, 0.0));
  }

  if (example.transform) {
    double worst = 0.0;
    for (std::size_t k = 0; k < options.samples; ++k) {
      const PhaseState z = random_near(example.z0, options.symplectic.radius, rng);
      const PhaseState back = example.transform->inverse(example.transform->forward(z));
      worst = std::max({worst, (back.x - z.x).cwiseAbs().maxCoeff(), (back.y - z.y).cwiseAbs().maxCoeff()});
    }
    out.push_back(make_check("transform-roundtrip", worst, 1e-12));
  }

  const auto names = example.invariant_names();
  if (std::find(names.begin(), names.end(), "casimir") != names.end()) {
    const auto& cas = example.invariant("casimir");
    const double c0 = cas.eval(example.z0);
    double worst = 0.0;
    for (std::size_t k = 0; k < options.samples; ++k) {
      const PhaseState z = random_near(example.z0, options.symplectic.radius, rng);
      worst = std::max(worst, std::abs(cas.eval(z) - c0) / std::max(1.0, std::abs(c0)));
    }
    out.push_back(make_check("casimir-identity", worst, 1e-12));
  }

  if (example.linear) {
    double worst = 0.0;
    const Eigen::Index d = model.dim();
    std::normal_distribution<double> n01;
    for (std::size_t k = 0; k < options.samples; ++k) {
      Vector packed(4 * d);
      for (Eigen::Index i = 0; i < packed.size(); ++i) packed[i] = n01(rng);
      const ExtendedState s = ExtendedState::from_packed(packed);
      for (std::size_t r = 0; r <= model.noise_channels(); ++r) {
        worst = std::max(worst, std::abs(example.linear->extended_condition(model, r, s)));
      }
    }
    out.push_back(make_check("linear-condition", worst, 1e-12));
  }

  for (SchemeId id : {SchemeId::SesSp1, SchemeId::SesSp2}) {
    const auto sym = projected_symplectic_residual(example, id, options.symplectic);
    out.push_back(make_check("symplectic-" + to_string(id), sym.max_residual, 1e-5));
    out.push_back(
        make_check("kernel-" + to_string(id), sym.max_kernel_residual, 10.0 * options.symplectic.projection.tol));
  }

  const auto drift = [&](const std::string& name, double gamma) {
    for (SchemeId id : {SchemeId::SesSp1, SchemeId::SesSp2}) {
      TrackSpec ts;
      ts.scheme = id;
      ts.dt = options.symplectic.dt;
      ts.t_end = ts.dt * static_cast<double>(options.invariant_steps);
      ts.seed = options.seed;
      ts.names = {name};
      ts.options.gammas = uniform_gammas(model, gamma);
      ts.options.projection = options.symplectic.projection;
      out.push_back(make_check(name + "-drift-" + to_string(id), max_abs_series(track(example, ts)), 1e-9));
    }
  };
  if (example.quadratic) drift("quadratic", 0.0);
  if (example.linear) drift("linear", options.linear_gamma);
  return out;
}

}  // namespace shs
