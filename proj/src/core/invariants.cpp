#include "shs/core/invariants.hpp"

namespace shs {

LinearInvariant::LinearInvariant(Vector a_x, Vector a_y) : a_x_(std::move(a_x)), a_y_(std::move(a_y)) {
  require_same_dim(a_x_.size(), a_y_.size(), "LinearInvariant a_y");
  if (a_x_.isZero(0.0) && a_y_.isZero(0.0)) throw std::invalid_argument("LinearInvariant: coefficient vector is zero");
}

double LinearInvariant::extended_condition(const HamiltonianModel& model, std::size_t r,
                                           const ExtendedState& s) const {
  require_same_dim(a_x_.size(), s.dim(), "LinearInvariant::extended_condition");
  const Eigen::Index d = s.dim();
  Vector gx1(d), gy1(d), gx2(d), gy2(d);
  model.gradient(r, s.x(), s.v(), gx1, gy1);
  model.gradient(r, s.u(), s.y(), gx2, gy2);
  // J grad H = (dH/dY, -dH/dX)
  return a_x_.dot(gy1 + gy2) - a_y_.dot(gx1 + gx2);
}

QuadraticInvariant::QuadraticInvariant(Matrix k11, Matrix k12, Matrix k22)
    : k11_(std::move(k11)), k12_(std::move(k12)), k22_(std::move(k22)) {
  const Eigen::Index d = k11_.rows();
  if (k11_.cols() != d || k12_.rows() != d || k12_.cols() != d || k22_.rows() != d || k22_.cols() != d) {
    throw std::invalid_argument("QuadraticInvariant: blocks must be square of equal size");
  }
  const auto symmetric = [](const Matrix& k) {
    return (k - k.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + k.cwiseAbs().maxCoeff());
  };
  if (!symmetric(k11_) || !symmetric(k22_)) throw std::invalid_argument("QuadraticInvariant: k11 and k22 must be symmetric");
}

Matrix QuadraticInvariant::assembled() const {
  const Eigen::Index d = k11_.rows();
  Matrix k(2 * d, 2 * d);
  k << k11_, k12_, k12_.transpose(), k22_;
  return k;
}

double eval_linear(const LinearInvariant& inv, const PhaseState& z) {
  require_same_dim(inv.a_x().size(), z.dim(), "eval_linear");
  return inv.a_x().dot(z.x) + inv.a_y().dot(z.y);
}

double eval_quadratic(const QuadraticInvariant& inv, const PhaseState& z) {
  require_same_dim(inv.k11().rows(), z.dim(), "eval_quadratic");
  return 0.5 * z.x.dot(inv.k11() * z.x) + z.x.dot(inv.k12() * z.y) + 0.5 * z.y.dot(inv.k22() * z.y);
}

}  // namespace shs
