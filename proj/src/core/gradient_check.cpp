#include "shs/core/gradient_check.hpp"

#include "shs/core/noise.hpp"

#include <algorithm>
#include <cmath>

namespace shs {

namespace {

double deviation(double fd, double exact) { return std::abs(fd - exact) / std::max(1.0, std::abs(exact)); }

}  // namespace

GradientCheckReport verify_gradients(const HamiltonianModel& model, const GradientCheckOptions& options) {
  if (!(options.fd_step > 0.0)) throw std::invalid_argument("verify_gradients: fd_step must be positive");
  const Eigen::Index d = model.dim();
  const Vector cx = options.center.x.size() == d ? options.center.x : Vector::Zero(d);
  const Vector cy = options.center.y.size() == d ? options.center.y : Vector::Zero(d);
  const std::uint64_t key = stream_key(options.seed, 0, 0);
  const double h = options.fd_step;

  GradientCheckReport report;
  std::uint64_t counter = 0;
  const auto uniform = [&] {
    // map a normal variate through the normal CDF to get a uniform on (-1, 1)
    const double z = stream_normal(key, counter++);
    return std::erf(z / std::sqrt(2.0));
  };

  Vector gx(d), gy(d);
  for (std::size_t s = 0; s < options.samples; ++s) {
    Vector x(d), y(d);
    for (Eigen::Index i = 0; i < d; ++i) x[i] = cx[i] + options.radius * uniform();
    for (Eigen::Index i = 0; i < d; ++i) y[i] = cy[i] + options.radius * uniform();

    for (std::size_t r = 0; r <= model.noise_channels(); ++r) {
      model.gradient(r, x, y, gx, gy);
      for (Eigen::Index i = 0; i < 2 * d; ++i) {
        Vector xp = x, xm = x, yp = y, ym = y;
        double exact = 0.0;
        if (i < d) {
          xp[i] += h;
          xm[i] -= h;
          exact = gx[i];
        } else {
          yp[i - d] += h;
          ym[i - d] -= h;
          exact = gy[i - d];
        }
        const double fd = (model.value(r, xp, yp) - model.value(r, xm, ym)) / (2.0 * h);
        const double dev = deviation(fd, exact);
        if (!(dev <= report.worst_deviation)) {
          report.worst_deviation = dev;
          report.worst_channel = r;
          report.worst_point = PhaseState(x, y);
        }
      }
    }

    if (model.has_noise_hessian() && model.noise_channels() >= 1) {
      Matrix xx(d, d), yy(d, d), yx(d, d);
      model.noise_hessian(x, y, xx, yy, yx);
      Vector gxp(d), gyp(d), gxm(d), gym(d);
      for (Eigen::Index j = 0; j < d; ++j) {
        Vector xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        model.gradient(1, xp, y, gxp, gyp);
        model.gradient(1, xm, y, gxm, gym);
        for (Eigen::Index i = 0; i < d; ++i) {
          report.worst_hessian_deviation =
              std::max(report.worst_hessian_deviation, deviation((gxp[i] - gxm[i]) / (2 * h), xx(i, j)));
          report.worst_hessian_deviation =
              std::max(report.worst_hessian_deviation, deviation((gyp[i] - gym[i]) / (2 * h), yx(i, j)));
        }
        Vector yp = y, ym = y;
        yp[j] += h;
        ym[j] -= h;
        model.gradient(1, x, yp, gxp, gyp);
        model.gradient(1, x, ym, gxm, gym);
        for (Eigen::Index i = 0; i < d; ++i) {
          report.worst_hessian_deviation =
              std::max(report.worst_hessian_deviation, deviation((gyp[i] - gym[i]) / (2 * h), yy(i, j)));
        }
      }
    }
  }
  report.passed = report.worst_deviation <= options.tol && report.worst_hessian_deviation <= options.tol;
  return report;
}

}  // namespace shs
