#pragma once

#include "shs/harness/schemes.hpp"
#include "shs/modelzoo/examples.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace shs {

struct ConvergenceSpec {
  SchemeId scheme = SchemeId::SesSp1;
  double t_end = 1.0;
  /// Coarse steps; each must be an integer multiple of ref_dt and divide t_end.
  std::vector<double> dts;
  /// Reference step; 0 means min(dts) / 16.
  double ref_dt = 0.0;
  std::size_t paths = 200;
  std::uint64_t seed = 1;
  SchemeOptions options;
  /// Worker threads; 0 means all hardware threads.
  unsigned threads = 0;
};

struct OrderReport {
  SchemeId scheme = SchemeId::SesSp1;
  std::vector<double> dts;
  /// RMS errors at T against the same scheme at ref_dt, per dt.
  std::vector<double> err_x, err_y, err;
  /// Jackknife standard errors of the above.
  std::vector<double> se_x, se_y, se;
  /// Summed stepping time over paths per dt (noise generation excluded).
  std::vector<double> wall_s;
  double slope_x = 0.0, slope_y = 0.0, slope = 0.0;
  double endpoint_slope_x = 0.0, endpoint_slope_y = 0.0, endpoint_slope = 0.0;
};

/// A failed path in a Monte Carlo run.
class PathFailure : public NoConvergence {
 public:
  PathFailure(const NoConvergence& cause, std::size_t path, double dt, std::size_t step);
  std::size_t path() const { return path_; }
  double dt() const { return dt_; }
  std::size_t step() const { return step_; }

 private:
  std::size_t path_;
  double dt_;
  std::size_t step_;
};

/// Mean-square errors at t_end with common random numbers: one noise grid
/// per path at ref_dt drives the reference and, coarsened, every dt.
OrderReport ms_error(const HamiltonianModel& model, const PhaseState& z0, const ConvergenceSpec& spec);

struct TimingSpec {
  std::vector<SchemeId> schemes;
  double t_end = 1.0;
  std::vector<double> dts;
  double ref_dt = 0.0;
  std::size_t paths = 20;
  std::uint64_t seed = 1;
  SchemeOptions options;
  /// Each timing is the minimum over this many repetitions.
  int repeats = 3;
};

struct TimingRow {
  SchemeId scheme;
  double dt;
  /// Combined RMS error against the same scheme at ref_dt.
  double err;
  double wall_s;
};

/// Single-threaded wall-clock comparison on identical noise. Noise
/// generation and coarsening happen outside the timed region.
std::vector<TimingRow> cpu_compare(const HamiltonianModel& model, const PhaseState& z0, const TimingSpec& spec);

struct TrackSpec {
  SchemeId scheme = SchemeId::SesSp1;
  double dt = 1e-2;
  double t_end = 1.0;
  std::uint64_t seed = 1;
  std::uint64_t path_index = 0;
  /// Registered invariant names, or "defect" (copy separation before the
  /// correction) and "residual" (after it) for projected schemes.
  std::vector<std::string> names;
  SchemeOptions options;
  /// Record every stride-th step.
  std::size_t stride = 1;
};

struct TrackSeries {
  std::string name;
  /// Relative deviation (I - I0) / |I0| (absolute when I0 == 0) for
  /// invariants; the raw norm for defect and residual.
  std::vector<double> value;
};

struct TrackResult {
  std::vector<double> t;
  std::vector<TrackSeries> series;
  PhaseState final_state;
};

TrackResult track(const ExampleSpec& example, const TrackSpec& spec);

/// Steps of size dt in [0, t_end]; throws unless t_end / dt is an integer.
std::size_t whole_steps(double t_end, double dt, const char* what);

}  // namespace shs
