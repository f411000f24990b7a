#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace shs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VecIn = Eigen::Ref<const Eigen::VectorXd>;
using VecOut = Eigen::Ref<Eigen::VectorXd>;

/// Point (X, Y) of the original 2d-dimensional phase space.
struct PhaseState {
  Vector x;
  Vector y;

  PhaseState() = default;
  PhaseState(Vector x_, Vector y_);

  Eigen::Index dim() const { return x.size(); }
  bool is_finite() const { return x.allFinite() && y.allFinite(); }

  /// (x, y) stacked into one 2d vector.
  Vector packed() const;
  static PhaseState from_packed(const Vector& z);
};

/// Point (X, U, Y, V) of the doubled phase space, stored packed as one 4d
/// vector in exactly that block order. The symplectic form is
/// dX^dY + dU^dV.
class ExtendedState {
 public:
  ExtendedState() = default;
  explicit ExtendedState(Eigen::Index dim);
  ExtendedState(const Vector& x, const Vector& u, const Vector& y, const Vector& v);
  static ExtendedState from_packed(Vector packed);

  Eigen::Index dim() const { return data_.size() / 4; }

  auto x() { return data_.segment(0, dim()); }
  auto u() { return data_.segment(dim(), dim()); }
  auto y() { return data_.segment(2 * dim(), dim()); }
  auto v() { return data_.segment(3 * dim(), dim()); }
  auto x() const { return data_.segment(0, dim()); }
  auto u() const { return data_.segment(dim(), dim()); }
  auto y() const { return data_.segment(2 * dim(), dim()); }
  auto v() const { return data_.segment(3 * dim(), dim()); }

  const Vector& packed() const { return data_; }
  Vector& packed() { return data_; }

  bool is_finite() const { return data_.allFinite(); }
  /// Exact equality of the two copies: x == u and y == v.
  bool on_diagonal() const;
  /// Euclidean norm of (x - u, y - v).
  double defect_norm() const;

 private:
  Vector data_;
};

/// Thrown when an implicit solve (projection multiplier, midpoint, symplectic
/// Euler) fails to reach its tolerance.
class NoConvergence : public std::runtime_error {
 public:
  NoConvergence(const std::string& what, int iterations, double last_delta)
      : std::runtime_error(what), iterations_(iterations), last_delta_(last_delta) {}

  int iterations() const { return iterations_; }
  double last_delta() const { return last_delta_; }

 private:
  int iterations_;
  double last_delta_;
};

void require_same_dim(Eigen::Index expected, Eigen::Index got, const char* what);

}  // namespace shs
