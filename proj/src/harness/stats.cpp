#include "shs/harness/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace shs {

LineFit ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ols_fit: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("ols_fit: x values are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      ss += r * r;
    }
    fit.slope_se = std::sqrt(ss / (n - 2.0) / sxx);
  }
  return fit;
}

double loglog_slope(std::span<const double> dt, std::span<const double> err) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < dt.size(); ++i) {
    if (!(dt[i] > 0.0) || !(err[i] > 0.0)) throw std::invalid_argument("loglog_slope: values must be positive");
    lx.push_back(std::log(dt[i]));
    ly.push_back(std::log(err[i]));
  }
  return ols_fit(lx, ly).slope;
}

double endpoint_slope(std::span<const double> dt, std::span<const double> err) {
  if (dt.size() < 2 || dt.size() != err.size()) throw std::invalid_argument("endpoint_slope: need >= 2 points");
  const std::size_t k = dt.size() - 1;
  return (std::log(err[k]) - std::log(err[0])) / (std::log(dt[k]) - std::log(dt[0]));
}

RmsEstimate rms_with_jackknife(std::span<const double> squared) {
  const std::size_t n = squared.size();
  if (n == 0) throw std::invalid_argument("rms_with_jackknife: no samples");
  double total = 0.0;
  for (double s : squared) total += s;
  RmsEstimate est;
  est.value = std::sqrt(total / static_cast<double>(n));
  if (n < 2) return est;
  const double nn = static_cast<double>(n);
  double mean_loo = 0.0;
  std::vector<double> loo(n);
  for (std::size_t i = 0; i < n; ++i) {
    loo[i] = std::sqrt(std::max(0.0, (total - squared[i]) / (nn - 1.0)));
    mean_loo += loo[i];
  }
  mean_loo /= nn;
  double var = 0.0;
  for (double v : loo) var += (v - mean_loo) * (v - mean_loo);
  est.se = std::sqrt((nn - 1.0) / nn * var);
  return est;
}

LineFit batch_means_trend(std::span<const double> t, std::span<const double> value, std::size_t blocks) {
  if (t.size() != value.size()) throw std::invalid_argument("batch_means_trend: size mismatch");
  if (blocks < 3 || t.size() < blocks) throw std::invalid_argument("batch_means_trend: need >= 3 non-empty blocks");
  std::vector<double> bt(blocks), bv(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * t.size() / blocks;
    const std::size_t hi = (b + 1) * t.size() / blocks;
    double st = 0.0, sv = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      st += t[i];
      sv += value[i];
    }
    bt[b] = st / static_cast<double>(hi - lo);
    bv[b] = sv / static_cast<double>(hi - lo);
  }
  return ols_fit(bt, bv);
}

}  // namespace shs
