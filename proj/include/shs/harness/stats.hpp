#pragma once

#include <span>
#include <vector>

namespace shs {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Standard error of the slope from the fit residuals (0 for two points).
  double slope_se = 0.0;
};

/// Ordinary least squares y = intercept + slope x; needs >= 2 distinct x.
LineFit ols_fit(std::span<const double> x, std::span<const double> y);

/// OLS slope of log(err) against log(dt).
double loglog_slope(std::span<const double> dt, std::span<const double> err);
/// Slope through the first and last point on log-log axes.
double endpoint_slope(std::span<const double> dt, std::span<const double> err);

/// sqrt(mean(sq)) and its leave-one-out jackknife standard error.
struct RmsEstimate {
  double value = 0.0;
  double se = 0.0;
};
RmsEstimate rms_with_jackknife(std::span<const double> squared);

/// Linear trend of a series judged on batch means: the series is cut into
/// `blocks` contiguous blocks, and an OLS line is fitted to the block means
/// against the block mid-times. Slope and standard error are per unit time.
LineFit batch_means_trend(std::span<const double> t, std::span<const double> value, std::size_t blocks);

}  // namespace shs
