#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace shs {

// Brownian increments are produced by a counter-based generator so that any
// increment is a pure function of (seed, path_index, channel, fine index):
//
//   key      = stream_key(seed, path_index, channel)
//   u_j      = (splitmix64(key + (j + 1) * 0x9E3779B97F4A7C15) >> 11 + 0.5) * 2^-53
//   (z_2i, z_2i+1) = Box-Muller(u_2i, u_2i+1)
//   inc[r][k] = sqrt(dt_fine) * z_k
//
// Paths and channels can therefore be generated in any order or in parallel
// without changing a single bit.

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t path_index, std::uint64_t channel);
/// k-th standard normal variate of the stream identified by key.
double stream_normal(std::uint64_t key, std::uint64_t k);

/// Rational step fraction used to split a step into noise windows.
struct Fraction {
  int num = 1;
  int den = 1;

  double value() const { return static_cast<double>(num) / den; }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// Increments over one (sub)window. delta[0] is the window length, delta[r]
/// the increment of Wiener channel r over the window.
struct StepIncrements {
  std::vector<double> delta;

  double tau() const { return delta[0]; }
  std::size_t noise_channels() const { return delta.size() - 1; }
};

struct NoiseOptions {
  /// Clip fine increments at 2*sqrt(dt*|ln dt|). Off by default.
  bool truncate = false;
};

/// Brownian increments of m channels on a uniform fine grid. Channel 0 is
/// the clock: inc(0)[k] == dt_fine.
class NoiseGrid {
 public:
  NoiseGrid(double t0, double dt_fine, std::vector<std::vector<double>> increments, std::uint64_t seed = 0,
            std::uint64_t path_index = 0);

  /// Grid from explicit Wiener increments (channels 1..m); the clock channel
  /// is filled in.
  static NoiseGrid from_increments(double t0, double dt_fine, const std::vector<std::vector<double>>& wiener);

  std::size_t noise_channels() const { return inc_.size() - 1; }
  double t0() const { return t0_; }
  double dt_fine() const { return dt_fine_; }
  std::size_t n_fine() const { return inc_.front().size(); }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t path_index() const { return path_index_; }

  std::span<const double> increments(std::size_t channel) const { return inc_.at(channel); }
  /// Fixed-order sum of fine increments [begin, begin + count) of a channel.
  double window_sum(std::size_t channel, std::size_t begin, std::size_t count) const;

 private:
  double t0_;
  double dt_fine_;
  std::vector<std::vector<double>> inc_;
  std::uint64_t seed_;
  std::uint64_t path_index_;
};

NoiseGrid build_noise_grid(std::uint64_t seed, std::uint64_t path_index, std::size_t channels, double t0,
                           double t_end, std::size_t n_fine, const NoiseOptions& options = {});

/// Sums consecutive blocks of `factor` fine increments.
NoiseGrid coarsen(const NoiseGrid& grid, std::size_t factor);

/// Increments of step `step` (each step spans fine_per_step fine intervals)
/// split into consecutive windows of the given fractions.
std::vector<StepIncrements> step_windows(const NoiseGrid& grid, std::size_t fine_per_step, std::size_t step,
                                         std::span<const Fraction> split);

/// Number of whole steps the grid holds at fine_per_step fine intervals each.
std::size_t step_count(const NoiseGrid& grid, std::size_t fine_per_step);

}  // namespace shs
