#include "shs/core/types.hpp"

#include <sstream>

namespace shs {

PhaseState::PhaseState(Vector x_, Vector y_) : x(std::move(x_)), y(std::move(y_)) {
  require_same_dim(x.size(), y.size(), "PhaseState y");
}

Vector PhaseState::packed() const {
  Vector z(2 * dim());
  z << x, y;
  return z;
}

PhaseState PhaseState::from_packed(const Vector& z) {
  if (z.size() % 2 != 0) throw std::invalid_argument("PhaseState::from_packed: odd length");
  const Eigen::Index d = z.size() / 2;
  return PhaseState(z.head(d), z.tail(d));
}

ExtendedState::ExtendedState(Eigen::Index dim) : data_(Vector::Zero(4 * dim)) {}

ExtendedState::ExtendedState(const Vector& x, const Vector& u, const Vector& y, const Vector& v) {
  require_same_dim(x.size(), u.size(), "ExtendedState u");
  require_same_dim(x.size(), y.size(), "ExtendedState y");
  require_same_dim(x.size(), v.size(), "ExtendedState v");
  data_.resize(4 * x.size());
  data_ << x, u, y, v;
}

ExtendedState ExtendedState::from_packed(Vector packed) {
  if (packed.size() % 4 != 0) throw std::invalid_argument("ExtendedState::from_packed: length not a multiple of 4");
  ExtendedState s;
  s.data_ = std::move(packed);
  return s;
}

bool ExtendedState::on_diagonal() const { return x() == u() && y() == v(); }

double ExtendedState::defect_norm() const {
  return std::sqrt((x() - u()).squaredNorm() + (y() - v()).squaredNorm());
}

void require_same_dim(Eigen::Index expected, Eigen::Index got, const char* what) {
  if (expected != got) {
    std::ostringstream os;
    os << what << ": dimension mismatch (expected " << expected << ", got " << got << ")";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace shs
