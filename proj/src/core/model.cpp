#include "shs/core/model.hpp"

#include <cmath>

namespace shs {

HamiltonianModel::HamiltonianModel(ModelDefinition def)
    : label_(std::move(def.label)),
      dim_(def.dim),
      terms_(std::move(def.terms)),
      noise_hessian_(std::move(def.noise_hessian)) {
  if (dim_ <= 0) throw std::invalid_argument("HamiltonianModel: dimension must be positive");
  if (terms_.empty()) throw std::invalid_argument("HamiltonianModel: need at least the drift Hamiltonian");
  for (const auto& t : terms_) {
    if (!t.value || !t.gradient) throw std::invalid_argument("HamiltonianModel: term without value or gradient");
  }
  if (!def.proportional_to_drift.empty()) {
    if (def.proportional_to_drift.size() != terms_.size() || def.proportional_to_drift.front() != 1.0) {
      throw std::invalid_argument("HamiltonianModel: proportionality hint needs m+1 coefficients with coeff[0] == 1");
    }
    proportional_ = std::move(def.proportional_to_drift);
  }
}

double HamiltonianModel::value(std::size_t r, VecIn x, VecIn y) const { return terms_.at(r).value(x, y); }

void HamiltonianModel::gradient(std::size_t r, VecIn x, VecIn y, VecOut gx, VecOut gy) const {
  terms_[r].gradient(x, y, gx, gy);
}

Vector HamiltonianModel::grad_x(std::size_t r, VecIn x, VecIn y) const {
  Vector gx(dim_), gy(dim_);
  terms_.at(r).gradient(x, y, gx, gy);
  return gx;
}

Vector HamiltonianModel::grad_y(std::size_t r, VecIn x, VecIn y) const {
  Vector gx(dim_), gy(dim_);
  terms_.at(r).gradient(x, y, gx, gy);
  return gy;
}

void HamiltonianModel::noise_hessian(VecIn x, VecIn y, Matrix& xx, Matrix& yy, Matrix& yx) const {
  if (!noise_hessian_) throw std::logic_error("HamiltonianModel: no analytic noise Hessian installed");
  noise_hessian_(x, y, xx, yy, yx);
}

}  // namespace shs
