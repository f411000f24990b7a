#pragma once

#include "shs/core/model.hpp"
#include "shs/core/types.hpp"

namespace shs {

/// I(Z) = a_x^T X + a_y^T Y.
class LinearInvariant {
 public:
  LinearInvariant(Vector a_x, Vector a_y);

  const Vector& a_x() const { return a_x_; }
  const Vector& a_y() const { return a_y_; }

  /// Residual of a^T J grad H_r(X,V) + a^T J grad H_r(U,Y) at an extended
  /// point; zero for every r means the lifted functional is conserved by the
  /// split flows.
  double extended_condition(const HamiltonianModel& model, std::size_t r, const ExtendedState& s) const;

 private:
  Vector a_x_;
  Vector a_y_;
};

/// Q(Z) = 1/2 X^T k11 X + X^T k12 Y + 1/2 Y^T k22 Y. Only symmetry of the
/// diagonal blocks is required; k may be singular.
class QuadraticInvariant {
 public:
  QuadraticInvariant(Matrix k11, Matrix k12, Matrix k22);

  const Matrix& k11() const { return k11_; }
  const Matrix& k12() const { return k12_; }
  const Matrix& k22() const { return k22_; }

  /// Full 2d x 2d matrix [k11 k12; k12^T k22].
  Matrix assembled() const;

 private:
  Matrix k11_;
  Matrix k12_;
  Matrix k22_;
};

double eval_linear(const LinearInvariant& inv, const PhaseState& z);
double eval_quadratic(const QuadraticInvariant& inv, const PhaseState& z);

}  // namespace shs
