#include "shs/baseline/baseline.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace shs {

namespace {

void check_increments(const HamiltonianModel& model, const StepIncrements& inc, const char* what) {
  if (inc.delta.size() != model.noise_channels() + 1) {
    std::ostringstream os;
    os << what << ": expected " << model.noise_channels() + 1 << " increments, got " << inc.delta.size();
    throw std::invalid_argument(os.str());
  }
}

/// Newton on g(w) = 0 with a forward-difference Jacobian. `g` writes the
/// residual of w into its second argument.
template <class Residual>
void newton_solve(Residual&& g, Vector& w, const ImplicitSolverConfig& cfg, const char* what) {
  const Eigen::Index n = w.size();
  Vector r(n), rp(n), dw(n);
  Matrix jac(n, n);
  Eigen::PartialPivLU<Matrix> lu(n);
  double last = 0.0;
  for (int k = 0; k < cfg.max_iter; ++k) {
    g(w, r);
    last = r.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(last)) break;
    if (last <= cfg.tol) return;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double wj = w[j];
      w[j] = wj + cfg.fd_step * (1.0 + std::abs(wj));
      const double h = w[j] - wj;
      g(w, rp);
      w[j] = wj;
      jac.col(j) = (rp - r) / h;
    }
    lu.compute(jac);
    dw.noalias() = lu.solve(r);
    w -= dw;
  }
  if (std::isfinite(last)) {
    g(w, r);
    last = r.lpNorm<Eigen::Infinity>();
    if (last <= cfg.tol) return;
  }
  std::ostringstream os;
  os << what << ": Newton did not reach tol " << cfg.tol << " in " << cfg.max_iter << " iterations (residual "
     << last << ")";
  throw NoConvergence(os.str(), cfg.max_iter, last);
}

}  // namespace

void ImplicitSolverConfig::validate() const {
  if (!(tol > 0.0) || max_iter < 1 || !(fd_step > 0.0)) {
    throw std::invalid_argument("ImplicitSolverConfig: tol, max_iter and fd_step must be positive");
  }
}

PhaseState midpoint_step(const HamiltonianModel& model, const PhaseState& z, const StepIncrements& inc,
                         const ImplicitSolverConfig& cfg) {
  cfg.validate();
  require_same_dim(model.dim(), z.dim(), "midpoint_step");
  check_increments(model, inc, "midpoint_step");
  const Eigen::Index d = model.dim();
  const std::size_t channels = inc.delta.size();
  Vector gx(d), gy(d), mx(d), my(d);

  // Writes (sum_r gy_r delta_r, -sum_r gx_r delta_r) at (x, y) into f.
  const auto drift = [&](VecIn x, VecIn y, Vector& f) {
    f.setZero();
    for (std::size_t r = 0; r < channels; ++r) {
      if (inc.delta[r] == 0.0) continue;
      model.gradient(r, x, y, gx, gy);
      f.head(d) += inc.delta[r] * gy;
      f.tail(d) -= inc.delta[r] * gx;
    }
  };

  const Vector z0 = z.packed();
  Vector f(2 * d);
  drift(z.x, z.y, f);
  Vector w = z0 + f;
  newton_solve(
      [&](const Vector& wv, Vector& res) {
        mx = 0.5 * (z0.head(d) + wv.head(d));
        my = 0.5 * (z0.tail(d) + wv.tail(d));
        drift(mx, my, f);
        res = wv - z0 - f;
      },
      w, cfg, "midpoint_step");
  return PhaseState::from_packed(w);
}

void noise_hessian_blocks(const HamiltonianModel& model, VecIn x, VecIn y, Matrix& xx, Matrix& yy, Matrix& yx) {
  const Eigen::Index d = model.dim();
  xx.resize(d, d);
  yy.resize(d, d);
  yx.resize(d, d);
  if (model.has_noise_hessian()) {
    model.noise_hessian(x, y, xx, yy, yx);
    return;
  }
  const double h = 1e-6 * (1.0 + std::sqrt(x.squaredNorm() + y.squaredNorm()));
  Vector gxp(d), gyp(d), gxm(d), gym(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Vector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const double hx = xp[j] - xm[j];
    model.gradient(1, xp, y, gxp, gyp);
    model.gradient(1, xm, y, gxm, gym);
    xx.col(j) = (gxp - gxm) / hx;
    yx.col(j) = (gyp - gym) / hx;

    Vector yp = y, ym = y;
    yp[j] += h;
    ym[j] -= h;
    const double hy = yp[j] - ym[j];
    model.gradient(1, x, yp, gxp, gyp);
    model.gradient(1, x, ym, gxm, gym);
    yy.col(j) = (gyp - gym) / hy;
  }
}

PhaseState symplectic_euler_step(const HamiltonianModel& model, const PhaseState& z, const StepIncrements& inc,
                                 const ImplicitSolverConfig& cfg) {
  cfg.validate();
  if (model.noise_channels() != 1) {
    throw std::invalid_argument("symplectic_euler_step: scheme is defined for exactly one noise channel");
  }
  require_same_dim(model.dim(), z.dim(), "symplectic_euler_step");
  check_increments(model, inc, "symplectic_euler_step");
  const Eigen::Index d = model.dim();
  const double dt = inc.delta[0];
  Vector gx(d), gy(d), g1x(d), g1y(d);
  Matrix xx, yy, yx;

  // X-equation right-hand side and Y-update at (x1, y0).
  const auto increments = [&](VecIn x1, Vector* dx, Vector* dy) {
    if (dx) dx->setZero();
    if (dy) dy->setZero();
    for (std::size_t r = 0; r < inc.delta.size(); ++r) {
      model.gradient(r, x1, z.y, gx, gy);
      if (dx) *dx += inc.delta[r] * gy;
      if (dy) *dy -= inc.delta[r] * gx;
      if (r == 1) {
        g1x = gx;
        g1y = gy;
      }
    }
    if (dt != 0.0) {
      noise_hessian_blocks(model, x1, z.y, xx, yy, yx);
      if (dx) *dx -= 0.5 * (yy * g1x - 0.5 * (yx * g1y)) * dt;
      if (dy) *dy -= 0.5 * (xx * g1y - 0.5 * (yx * g1x)) * dt;
    }
  };

  Vector dx(d), dy(d);
  increments(z.x, &dx, nullptr);
  Vector x1 = z.x + dx;
  newton_solve(
      [&](const Vector& xv, Vector& res) {
        increments(xv, &dx, nullptr);
        res = xv - z.x - dx;
      },
      x1, cfg, "symplectic_euler_step");
  increments(x1, nullptr, &dy);
  return PhaseState(x1, z.y + dy);
}

}  // namespace shs
