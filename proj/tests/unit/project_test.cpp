#include "helpers.hpp"

#include "shs/modelzoo/examples.hpp"
#include "shs/project/projection.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace shs;
using testing::state;
using testing::vec;

namespace {

/// A = [I -I 0 0; 0 0 I -I] applied to a packed extended vector.
Vector apply_a(const Vector& p) {
  const Eigen::Index d = p.size() / 4;
  Vector out(2 * d);
  out << p.segment(0, d) - p.segment(d, d), p.segment(2 * d, d) - p.segment(3 * d, d);
  return out;
}

PhaseState perturbed(const PhaseState& z, std::mt19937_64& rng, double r) {
  std::uniform_real_distribution<double> u(-r, r);
  PhaseState out = z;
  for (Eigen::Index i = 0; i < z.dim(); ++i) {
    out.x[i] += u(rng);
    out.y[i] += u(rng);
  }
  return out;
}

}  // namespace

TEST_SUITE("project") {
  TEST_CASE("lift and restrict") {
    const ExtendedState s = lift(state({1.0}, {2.0}));
    CHECK(s.packed() == vec({1.0, 1.0, 2.0, 2.0}));
    CHECK(s.on_diagonal());
    CHECK(apply_a(s.packed()).isZero(0.0));

    const PhaseState back = restrict_state(s);
    CHECK(back.x[0] == 1.0);
    CHECK(back.y[0] == 2.0);

    const PhaseState mean = restrict_state(ExtendedState(vec({1.0}), vec({3.0}), vec({0.0}), vec({4.0})));
    CHECK(mean.x[0] == 2.0);
    CHECK(mean.y[0] == 2.0);

    const PhaseState z = state({0.3, -1.7}, {2.5, 0.125});
    const PhaseState r = restrict_state(lift(z));
    CHECK(r.x == z.x);
    CHECK(r.y == z.y);
  }

  TEST_CASE("projection config validation") {
    CHECK_NOTHROW(ProjectionConfig{}.validate());
    CHECK_THROWS_AS((ProjectionConfig{0.0, 10, true}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ProjectionConfig{1e-12, 0, true}.validate()), std::invalid_argument);
  }

  TEST_CASE("zero increments leave the state unchanged after one iteration") {
    const ExampleSpec ex = make_example1(0.4);
    Composer c(ex.model, CompositionRecipe::strang({0.3, 0.3}));
    std::vector<StepIncrements> zero(5, testing::increments(0.0, {0.0}));
    c.load_stage_increments(zero);
    const auto r = projection_step(c, ex.z0, {});
    CHECK(r.z.x == ex.z0.x);
    CHECK(r.z.y == ex.z0.y);
    CHECK(r.report.lambda.isZero(0.0));
    CHECK(r.report.iterations == 1);
  }

  TEST_CASE("simplified Newton on a constant residual converges to lambda = -2 e1") {
    const ExtendedMap constant = [](Vector& v) {
      v.setZero();
      v[0] = 4.0;
    };
    Vector out;
    const auto rep = solve_symmetric_projection(constant, Vector::Zero(8), {1e-13, 100, false}, out);
    REQUIRE(rep.lambda.size() == 4);
    CHECK(rep.lambda[0] == doctest::Approx(-2.0).epsilon(1e-12));
    for (Eigen::Index i = 1; i < 4; ++i) CHECK(std::abs(rep.lambda[i]) < 1e-12);
  }

  TEST_CASE("a projection equation without a root reports NoConvergence") {
    // x' = u - (x - u) + 1 makes A F + 2 lambda = (1, 0) for every lambda.
    const ExtendedMap rootless = [](Vector& v) { v[0] = v[1] - (v[0] - v[1]) + 1.0; };
    Vector out;
    CHECK_THROWS_AS(solve_symmetric_projection(rootless, Vector::Zero(4), {1e-12, 30, true}, out), NoConvergence);
  }

  TEST_CASE("Strang projection on the oscillator follows the exact rotation") {
    const auto m = testing::oscillator_model();
    const NoiseGrid g = testing::clock_grid(0.1, 1);
    const auto r = projection_step(CompositionRecipe::strang(), m, state({1.0}, {0.0}), g, 0, {});
    CHECK(std::abs(r.z.x[0] - std::cos(0.1)) < 1e-4);
    CHECK(std::abs(r.z.y[0] + std::sin(0.1)) < 1e-4);
  }

  TEST_CASE("kernel membership and symmetric defect after a projected step") {
    const ExampleSpec ex = make_example3(0.5);
    const ProjectionConfig cfg{1e-12, 100, true};
    std::mt19937_64 rng(3);
    for (std::uint64_t k = 0; k < 20; ++k) {
      const NoiseGrid g = build_noise_grid(2, k, 1, 0.0, 0.02, 2);
      for (const auto& recipe : {CompositionRecipe::lie({0.5, 0.5}), CompositionRecipe::strang({0.5, 0.5})}) {
        Composer c(ex.model, recipe);
        c.load_step(g, 2, 0);
        const PhaseState z = perturbed(ex.z0, rng, 0.3);
        const auto r = projection_step(c, z, cfg);
        // The returned state is restricted, so its lift is on the diagonal.
        CHECK(apply_a(lift(r.z).packed()).isZero(0.0));
        // Copy separation left by the last simplified Newton update.
        CHECK(r.report.residual <= 4.0 * cfg.tol);

        const Eigen::Index d = ex.model.dim();
        Vector pre = lift(z).packed();
        pre.segment(0, d) += r.report.lambda.head(d);
        pre.segment(d, d) -= r.report.lambda.head(d);
        pre.segment(2 * d, d) += r.report.lambda.tail(d);
        pre.segment(3 * d, d) -= r.report.lambda.tail(d);
        const Vector pre_diff = apply_a(pre);
        c.apply(pre);
        const Vector post_diff = -apply_a(pre);
        CHECK((post_diff - pre_diff).lpNorm<Eigen::Infinity>() <= 4.0 * cfg.tol);
      }
    }
  }

  TEST_CASE("projected maps are symplectic at fixed noise") {
    for (const std::string& name : example_names()) {
      const ExampleSpec ex = make_example(name, default_noise_scale(name));
      const std::size_t m = ex.model.noise_channels();
      std::mt19937_64 rng(12);
      double worst = 0.0;
      for (std::uint64_t k = 0; k < 5; ++k) {
        const NoiseGrid g = build_noise_grid(4, k, m, 0.0, 0.01, 2);
        Composer c(ex.model, CompositionRecipe::strang(std::vector<double>(m + 1, 0.5)));
        c.load_step(g, 2, 0);
        const PackedMap map = [&](const Vector& p) {
          return projection_step(c, PhaseState::from_packed(p), {1e-13, 100, true}).z.packed();
        };
        worst = std::max(worst, symplectic_residual(map, perturbed(ex.z0, rng, 0.2).packed(), 1e-5));
      }
      CHECK_MESSAGE(worst <= 1e-5, name);
    }
  }

  TEST_CASE("simulate over zero steps returns the initial state") {
    const auto m = testing::oscillator_model();
    const NoiseGrid g(0.0, 0.1, {{0.1}});
    const Trajectory tr = simulate(CompositionRecipe::strang(), m, state({1.0}, {0.0}), g, {}, {});
    REQUIRE(tr.states.size() == 1);
    CHECK(tr.t == std::vector<double>{0.0});
    CHECK(tr.final_state.x[0] == 1.0);
  }

  TEST_CASE("Example 1 defect stays at the Newton tolerance after projection") {
    const ExampleSpec ex = make_example1(0.15);
    const ProjectionConfig cfg{1e-12, 50, true};
    const NoiseGrid g = build_noise_grid(1, 0, 1, 0.0, 1.0, 200);
    SimulateOptions opt;
    opt.fine_per_step = 2;
    const Trajectory tr = simulate(CompositionRecipe::lie({1.0, 1.0}), ex.model, ex.z0, g, {}, cfg, opt);
    REQUIRE(tr.defect_post.size() == 101);
    double pre = 0.0;
    for (std::size_t n = 0; n < tr.defect_post.size(); ++n) {
      CHECK(tr.defect_post[n] <= 10.0 * cfg.tol);
      pre = std::max(pre, tr.defect_pre[n]);
    }
    CHECK(pre > 0.0);
    CHECK(pre < 1.0);
  }

  TEST_CASE("Example 3 invariants along projected trajectories") {
    const ExampleSpec ex = make_example3(0.5);
    const std::vector<Tracker> trackers{
        {"quadratic", [&](const PhaseState& z) { return eval_quadratic(*ex.quadratic, z); }},
        {"linear", [&](const PhaseState& z) { return eval_linear(*ex.linear, z); }}};
    const NoiseGrid g = build_noise_grid(1, 0, 1, 0.0, 100.0, 20000);
    SimulateOptions opt;
    opt.keep_states = false;
    opt.fine_per_step = 2;
    const auto drift = [](const std::vector<double>& s) {
      double worst = 0.0;
      for (double v : s) worst = std::max(worst, std::abs(v - s.front()) / std::abs(s.front()));
      return worst;
    };
    const ProjectionConfig cfg{1e-12, 50, true};
    for (const auto& recipe : {CompositionRecipe::lie(), CompositionRecipe::strang()}) {
      const Trajectory tr = simulate(recipe, ex.model, ex.z0, g, trackers, cfg, opt);
      REQUIRE(tr.series[0].size() == 10001);
      CHECK(drift(tr.series[0]) <= 1e-9);
      CHECK(drift(tr.series[1]) <= 1e-9);
    }
    const Trajectory restrained = simulate(CompositionRecipe::lie({0.5, 0.5}), ex.model, ex.z0, g, trackers, cfg, opt);
    CHECK(drift(restrained.series[1]) <= 1e-9);
  }

  TEST_CASE("the bare composition separates the copies at first order") {
    const ExampleSpec ex = make_example3(0.5);
    const NoiseGrid g = build_noise_grid(1, 0, 1, 0.0, 1.0, 200);
    SimulateOptions opt;
    opt.project = false;
    opt.fine_per_step = 2;
    const Trajectory tr = simulate(CompositionRecipe::lie(), ex.model, ex.z0, g, {}, {}, opt);
    CHECK(tr.defect_pre.front() == 0.0);
    CHECK(tr.defect_pre.back() > 1e-6);
  }
}
