#include "helpers.hpp"

#include "shs/core/gradient_check.hpp"
#include "shs/core/invariants.hpp"
#include "shs/core/model.hpp"
#include "shs/core/noise.hpp"
#include "shs/modelzoo/examples.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace shs;
using testing::state;
using testing::vec;

TEST_SUITE("core") {
  TEST_CASE("clock channel of a noiseless grid is the fine step") {
    const NoiseGrid g = build_noise_grid(1, 0, 0, 0.0, 1.0, 4);
    CHECK(g.noise_channels() == 0);
    REQUIRE(g.n_fine() == 4);
    for (double v : g.increments(0)) CHECK(v == 0.25);
  }

  TEST_CASE("noise grids are bit-identical for identical arguments") {
    const NoiseGrid a = build_noise_grid(42, 7, 3, 0.0, 2.0, 64);
    const NoiseGrid b = build_noise_grid(42, 7, 3, 0.0, 2.0, 64);
    for (std::size_t r = 0; r <= 3; ++r) {
      const auto ia = a.increments(r);
      const auto ib = b.increments(r);
      CHECK(std::equal(ia.begin(), ia.end(), ib.begin(), ib.end()));
    }
    CHECK(a.seed() == 42);
    CHECK(a.path_index() == 7);
  }

  TEST_CASE("different paths and channels draw different streams") {
    const NoiseGrid a = build_noise_grid(42, 0, 2, 0.0, 1.0, 8);
    const NoiseGrid b = build_noise_grid(42, 1, 2, 0.0, 1.0, 8);
    CHECK(a.increments(1)[0] != b.increments(1)[0]);
    CHECK(a.increments(1)[0] != a.increments(2)[0]);
  }

  TEST_CASE("fine increments have variance dt_fine and path totals are standard normal") {
    const std::size_t n_fine = 1u << 16;
    const NoiseGrid g = build_noise_grid(3, 0, 1, 0.0, 1.0, n_fine);
    const auto inc = g.increments(1);
    const double mean = std::accumulate(inc.begin(), inc.end(), 0.0) / static_cast<double>(n_fine);
    double var = 0.0;
    for (double w : inc) var += (w - mean) * (w - mean);
    var /= static_cast<double>(n_fine - 1);
    CHECK(std::abs(var * static_cast<double>(n_fine) - 1.0) < 0.05);

    std::vector<double> totals;
    for (std::uint64_t p = 0; p < 1000; ++p) {
      const NoiseGrid gp = build_noise_grid(3, p, 1, 0.0, 1.0, n_fine);
      totals.push_back(gp.window_sum(1, 0, n_fine));
    }
    std::sort(totals.begin(), totals.end());
    double d = 0.0;
    const double n = static_cast<double>(totals.size());
    for (std::size_t i = 0; i < totals.size(); ++i) {
      const double f = 0.5 * std::erfc(-totals[i] / std::sqrt(2.0));
      d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    CHECK(testing::ks_p_value(d, totals.size()) > 0.01);
  }

  TEST_CASE("truncation clips increments only when requested") {
    const double dt = 1.0 / 16;
    const double clip = 2.0 * std::sqrt(dt * std::abs(std::log(dt)));
    NoiseOptions on;
    on.truncate = true;
    bool any_clipped = false;
    for (std::uint64_t p = 0; p < 200; ++p) {
      const NoiseGrid raw = build_noise_grid(5, p, 1, 0.0, 1.0, 16);
      const NoiseGrid cut = build_noise_grid(5, p, 1, 0.0, 1.0, 16, on);
      for (std::size_t k = 0; k < 16; ++k) {
        const double w = raw.increments(1)[k];
        CHECK(std::abs(cut.increments(1)[k]) <= clip);
        if (std::abs(w) > clip) any_clipped = true;
        if (std::abs(w) <= clip) CHECK(cut.increments(1)[k] == w);
      }
    }
    CHECK(any_clipped);
  }

  TEST_CASE("build_noise_grid rejects an empty time range and zero steps") {
    CHECK_THROWS_AS(build_noise_grid(1, 0, 1, 1.0, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(build_noise_grid(1, 0, 1, 0.0, 1.0, 0), std::invalid_argument);
  }

  TEST_CASE("coarsen sums consecutive blocks") {
    const NoiseGrid g = NoiseGrid::from_increments(0.0, 0.25, {{1.0, 2.0, 4.0, 8.0}});
    const NoiseGrid c2 = coarsen(g, 2);
    REQUIRE(c2.n_fine() == 2);
    CHECK(c2.increments(1)[0] == 3.0);
    CHECK(c2.increments(1)[1] == 12.0);
    CHECK(c2.increments(0)[0] == 0.5);
    CHECK(c2.dt_fine() == 0.5);

    const NoiseGrid c4 = coarsen(g, 4);
    REQUIRE(c4.n_fine() == 1);
    CHECK(c4.increments(1)[0] == 15.0);
    CHECK(c4.increments(0)[0] == 1.0);

    CHECK_THROWS_AS(coarsen(g, 3), std::invalid_argument);
  }

  TEST_CASE("coarse increments equal fixed-order sums of fine increments") {
    const NoiseGrid g = build_noise_grid(11, 2, 2, 0.0, 1.0, 96);
    for (std::size_t factor : {2u, 3u, 8u, 96u}) {
      const NoiseGrid c = coarsen(g, factor);
      for (std::size_t r = 1; r <= 2; ++r) {
        for (std::size_t k = 0; k < c.n_fine(); ++k) {
          double s = 0.0;
          for (std::size_t j = 0; j < factor; ++j) s += g.increments(r)[k * factor + j];
          CHECK(c.increments(r)[k] == s);
        }
      }
    }
  }

  TEST_CASE("step_windows splits a step on the fine grid") {
    const NoiseGrid g = NoiseGrid::from_increments(0.0, 0.5, {{0.3, -0.7, 1.1, 0.2}});
    const std::vector<Fraction> whole{{1, 1}};
    const std::vector<Fraction> halves{{1, 2}, {1, 2}};

    const auto w1 = step_windows(g, 2, 0, whole);
    REQUIRE(w1.size() == 1);
    CHECK(w1[0].tau() == 1.0);
    CHECK(w1[0].delta[1] == 0.3 + -0.7);

    const auto w2 = step_windows(g, 2, 1, halves);
    REQUIRE(w2.size() == 2);
    CHECK(w2[0].delta[1] == 1.1);
    CHECK(w2[1].delta[1] == 0.2);
    CHECK(w2[0].tau() == 0.5);
  }

  TEST_CASE("window increments partition the full-step increment") {
    const NoiseGrid g = build_noise_grid(9, 0, 2, 0.0, 1.0, 8);
    const std::vector<Fraction> whole{{1, 1}};
    const std::vector<Fraction> halves{{1, 2}, {1, 2}};
    const std::vector<Fraction> uneven{{1, 4}, {3, 4}};
    for (std::size_t step = 0; step < 2; ++step) {
      const auto full = step_windows(g, 4, step, whole);
      for (const auto& split : {halves, uneven}) {
        const auto parts = step_windows(g, 4, step, split);
        for (std::size_t r = 0; r <= 2; ++r) {
          CHECK(parts[0].delta[r] + parts[1].delta[r] == doctest::Approx(full[0].delta[r]).epsilon(1e-15));
        }
      }
      const auto h = step_windows(g, 4, step, halves);
      for (std::size_t r = 1; r <= 2; ++r) {
        const double a = g.increments(r)[4 * step] + g.increments(r)[4 * step + 1];
        const double b = g.increments(r)[4 * step + 2] + g.increments(r)[4 * step + 3];
        CHECK(h[0].delta[r] == a);
        CHECK(h[1].delta[r] == b);
      }
    }
  }

  TEST_CASE("step_windows rejects windows off the fine grid and bad splits") {
    const NoiseGrid g = build_noise_grid(9, 0, 1, 0.0, 1.0, 4);
    const std::vector<Fraction> thirds{{1, 3}, {2, 3}};
    const std::vector<Fraction> short_split{{1, 2}};
    const std::vector<Fraction> halves{{1, 2}, {1, 2}};
    CHECK_THROWS_AS(step_windows(g, 2, 0, thirds), std::invalid_argument);
    CHECK_THROWS_AS(step_windows(g, 2, 0, short_split), std::invalid_argument);
    CHECK_THROWS_AS(step_windows(g, 1, 0, halves), std::invalid_argument);
  }

  TEST_CASE("eval_linear") {
    CHECK(eval_linear(LinearInvariant(vec({1.0}), vec({0.0})), state({3.0}, {7.0})) == 3.0);
    CHECK(eval_linear(LinearInvariant(vec({0.2}), vec({-0.3})), state({-1.0}, {1.0})) ==
          doctest::Approx(-0.5).epsilon(1e-15));
    CHECK_THROWS_AS(LinearInvariant(vec({0.0}), vec({0.0})), std::invalid_argument);
    CHECK_THROWS_AS(eval_linear(LinearInvariant(vec({1.0}), vec({0.0})), state({1.0, 2.0}, {3.0, 4.0})),
                    std::invalid_argument);
  }

  TEST_CASE("eval_quadratic") {
    const Matrix i1 = Matrix::Identity(1, 1);
    const Matrix z1 = Matrix::Zero(1, 1);
    CHECK(eval_quadratic(QuadraticInvariant(i1, z1, i1), state({1.0}, {1.0})) == 1.0);

    Matrix k11 = Matrix::Zero(2, 2), k22 = Matrix::Zero(2, 2);
    k11(1, 1) = 0.5;
    k22(1, 1) = 1.0;
    const QuadraticInvariant ex3(k11, Matrix::Zero(2, 2), k22);
    CHECK(eval_quadratic(ex3, state({-1.0, 2.0}, {1.0, -1.0})) == 1.5);
    CHECK(eval_quadratic(ex3, state({0.0, 0.0}, {0.0, 0.0})) == 0.0);

    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(QuadraticInvariant(bad, Matrix::Zero(2, 2), k22), std::invalid_argument);
    CHECK_THROWS_AS(eval_quadratic(ex3, state({1.0}, {1.0})), std::invalid_argument);
  }

  TEST_CASE("eval_quadratic equals the dense form with the assembled matrix") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n01;
    const auto rnd = [&](Eigen::Index r, Eigen::Index c) {
      Matrix m(r, c);
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n01(rng);
      return m;
    };
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix a = rnd(3, 3), b = rnd(3, 3);
      const QuadraticInvariant q(a + a.transpose(), rnd(3, 3), b + b.transpose());
      const Vector z = rnd(6, 1);
      const double dense = 0.5 * z.dot(q.assembled() * z);
      CHECK(eval_quadratic(q, PhaseState::from_packed(z)) == doctest::Approx(dense).epsilon(1e-13));
    }
  }

  TEST_CASE("verify_gradients accepts Example 1") {
    const ExampleSpec ex = make_example1(0.15);
    GradientCheckOptions opt;
    opt.samples = 100;
    opt.fd_step = 1e-5;
    opt.tol = 1e-6;
    const auto rep = verify_gradients(ex.model, opt);
    CHECK(rep.passed);
    CHECK(rep.worst_deviation < 1e-6);
    CHECK(rep.worst_hessian_deviation < 1e-6);
  }

  TEST_CASE("verify_gradients locates a sign error") {
    ModelDefinition def;
    def.label = "flipped";
    def.dim = 1;
    def.terms.push_back({[](VecIn x, VecIn y) { return 0.5 * (x[0] * x[0] + 1.0) * (y[0] * y[0] + 1.0); },
                         [](VecIn x, VecIn y, VecOut gx, VecOut gy) {
                           gx[0] = -x[0] * (y[0] * y[0] + 1.0);
                           gy[0] = (x[0] * x[0] + 1.0) * y[0];
                         }});
    const auto rep = verify_gradients(HamiltonianModel(def), {});
    CHECK_FALSE(rep.passed);
    CHECK(rep.worst_deviation > 1e-3);
    CHECK(rep.worst_channel == 0);
    CHECK(rep.worst_point.dim() == 1);
  }

  TEST_CASE("verify_gradients passes a constant Hamiltonian") {
    ModelDefinition def;
    def.label = "const";
    def.dim = 2;
    def.terms.push_back({[](VecIn, VecIn) { return 3.0; },
                         [](VecIn, VecIn, VecOut gx, VecOut gy) {
                           gx.setZero();
                           gy.setZero();
                         }});
    const auto rep = verify_gradients(HamiltonianModel(def), {});
    CHECK(rep.passed);
    CHECK(rep.worst_deviation == 0.0);
  }

  TEST_CASE("extended state accessors and defect") {
    const ExtendedState s(vec({1.0}), vec({3.0}), vec({0.0}), vec({4.0}));
    CHECK(s.packed()[1] == 3.0);
    CHECK(s.defect_norm() == doctest::Approx(std::sqrt(4.0 + 16.0)));
    CHECK_FALSE(s.on_diagonal());
    CHECK(ExtendedState(vec({1.0}), vec({1.0}), vec({2.0}), vec({2.0})).on_diagonal());
  }
}
