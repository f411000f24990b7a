#pragma once

#include "shs/core/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace shs {

using ScalarField = std::function<double(VecIn x, VecIn y)>;
/// Writes (dH/dX, dH/dY) at (x, y) into gx, gy.
using GradientField = std::function<void(VecIn x, VecIn y, VecOut gx, VecOut gy)>;
/// Second derivative blocks: xx(i,j) = d2H/dX_i dX_j, yy(i,j) = d2H/dY_i dY_j,
/// yx(i,j) = d2H/dY_i dX_j.
using HessianField = std::function<void(VecIn x, VecIn y, Matrix& xx, Matrix& yy, Matrix& yx)>;

struct HamiltonianTerm {
  ScalarField value;
  GradientField gradient;
};

struct ModelDefinition {
  std::string label;
  Eigen::Index dim = 0;
  /// terms[0] is the drift Hamiltonian H_0, terms[r] drives Wiener channel r.
  std::vector<HamiltonianTerm> terms;
  /// Optional analytic Hessian of H_1 (only the symplectic Euler baseline
  /// uses it).
  HessianField noise_hessian;
  /// Optional hint: H_r = coeff[r] * H_0 for every r (coeff[0] == 1).
  std::vector<double> proportional_to_drift;
};

/// Stochastic Hamiltonian system dX = sum_r dH_r/dY o dW_r,
/// dY = -sum_r dH_r/dX o dW_r with dW_0 = dt.
class HamiltonianModel {
 public:
  explicit HamiltonianModel(ModelDefinition def);

  const std::string& label() const { return label_; }
  Eigen::Index dim() const { return dim_; }
  /// Number m of Wiener channels (excludes the clock).
  std::size_t noise_channels() const { return terms_.size() - 1; }

  double value(std::size_t r, VecIn x, VecIn y) const;
  void gradient(std::size_t r, VecIn x, VecIn y, VecOut gx, VecOut gy) const;
  Vector grad_x(std::size_t r, VecIn x, VecIn y) const;
  Vector grad_y(std::size_t r, VecIn x, VecIn y) const;

  bool has_noise_hessian() const { return static_cast<bool>(noise_hessian_); }
  void noise_hessian(VecIn x, VecIn y, Matrix& xx, Matrix& yy, Matrix& yx) const;

  const std::optional<std::vector<double>>& proportionality() const { return proportional_; }

 private:
  std::string label_;
  Eigen::Index dim_;
  std::vector<HamiltonianTerm> terms_;
  HessianField noise_hessian_;
  std::optional<std::vector<double>> proportional_;
};

}  // namespace shs
