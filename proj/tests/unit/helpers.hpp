#pragma once

#include "shs/core/model.hpp"
#include "shs/core/noise.hpp"
#include "shs/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <vector>

namespace testing {

inline shs::Vector vec(std::initializer_list<double> v) {
  shs::Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) out[i++] = a;
  return out;
}

inline shs::PhaseState state(std::initializer_list<double> x, std::initializer_list<double> y) {
  return {vec(x), vec(y)};
}

/// d = 1 model with H0 = X Y and no noise.
inline shs::HamiltonianModel bilinear_model() {
  shs::ModelDefinition def;
  def.label = "xy";
  def.dim = 1;
  def.terms.push_back({[](shs::VecIn x, shs::VecIn y) { return x[0] * y[0]; },
                       [](shs::VecIn x, shs::VecIn y, shs::VecOut gx, shs::VecOut gy) {
                         gx[0] = y[0];
                         gy[0] = x[0];
                       }});
  return shs::HamiltonianModel(def);
}

/// d = 1 harmonic oscillator H0 = (X^2 + Y^2) / 2, with optional noise
/// H1 = c H0 when c != 0.
inline shs::HamiltonianModel oscillator_model(double c = 0.0) {
  shs::ModelDefinition def;
  def.label = "osc";
  def.dim = 1;
  const auto term = [](double s) {
    return shs::HamiltonianTerm{
        [s](shs::VecIn x, shs::VecIn y) { return 0.5 * s * (x[0] * x[0] + y[0] * y[0]); },
        [s](shs::VecIn x, shs::VecIn y, shs::VecOut gx, shs::VecOut gy) {
          gx[0] = s * x[0];
          gy[0] = s * y[0];
        }};
  };
  def.terms.push_back(term(1.0));
  if (c != 0.0) def.terms.push_back(term(c));
  return shs::HamiltonianModel(def);
}

/// Deterministic step increments: delta[0] = tau, the rest given.
inline shs::StepIncrements increments(double tau, std::initializer_list<double> dw = {}) {
  shs::StepIncrements inc;
  inc.delta.push_back(tau);
  for (double w : dw) inc.delta.push_back(w);
  return inc;
}

/// Grid of `steps` deterministic steps (no noise channels), each made of
/// `fine` fine intervals.
inline shs::NoiseGrid clock_grid(double dt, std::size_t steps, std::size_t fine = 2) {
  return shs::NoiseGrid(0.0, dt / static_cast<double>(fine),
                        {std::vector<double>(steps * fine, dt / static_cast<double>(fine))});
}

/// Kolmogorov-Smirnov p-value of the one-sample statistic d over n draws
/// (asymptotic distribution with the usual small-sample correction).
inline double ks_p_value(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lam = (sn + 0.12 + 0.11 / sn) * d;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lam * lam);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace testing
