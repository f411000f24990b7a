#include "shs/core/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace shs {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

double uniform_open(std::uint64_t key, std::uint64_t j) {
  const std::uint64_t bits = splitmix64(key + (j + 1) * kGolden) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

void normal_pair(std::uint64_t key, std::uint64_t pair, double& z0, double& z1) {
  const double u1 = uniform_open(key, 2 * pair);
  const double u2 = uniform_open(key, 2 * pair + 1);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  z0 = radius * std::cos(angle);
  z1 = radius * std::sin(angle);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t path_index, std::uint64_t channel) {
  std::uint64_t k = splitmix64(seed);
  k = splitmix64(k ^ (path_index * 0xD1B54A32D192ED03ULL));
  k = splitmix64(k ^ (channel * 0xABC98388FB8FAC03ULL));
  return k;
}

double stream_normal(std::uint64_t key, std::uint64_t k) {
  double z0 = 0.0, z1 = 0.0;
  normal_pair(key, k / 2, z0, z1);
  return (k % 2 == 0) ? z0 : z1;
}

NoiseGrid::NoiseGrid(double t0, double dt_fine, std::vector<std::vector<double>> increments, std::uint64_t seed,
                     std::uint64_t path_index)
    : t0_(t0), dt_fine_(dt_fine), inc_(std::move(increments)), seed_(seed), path_index_(path_index) {
  if (!(dt_fine_ > 0.0)) throw std::invalid_argument("NoiseGrid: dt_fine must be positive");
  if (inc_.empty() || inc_.front().empty()) throw std::invalid_argument("NoiseGrid: empty grid");
  for (const auto& ch : inc_) {
    if (ch.size() != inc_.front().size()) throw std::invalid_argument("NoiseGrid: ragged channels");
  }
}

NoiseGrid NoiseGrid::from_increments(double t0, double dt_fine, const std::vector<std::vector<double>>& wiener) {
  const std::size_t n = wiener.empty() ? 0 : wiener.front().size();
  if (n == 0) throw std::invalid_argument("NoiseGrid::from_increments: need at least one channel with increments");
  std::vector<std::vector<double>> inc;
  inc.reserve(wiener.size() + 1);
  inc.emplace_back(n, dt_fine);
  for (const auto& ch : wiener) inc.push_back(ch);
  return NoiseGrid(t0, dt_fine, std::move(inc));
}

double NoiseGrid::window_sum(std::size_t channel, std::size_t begin, std::size_t count) const {
  const auto& ch = inc_.at(channel);
  if (begin + count > ch.size()) throw std::out_of_range("NoiseGrid::window_sum: window past end of grid");
  double s = 0.0;
  for (std::size_t k = begin; k < begin + count; ++k) s += ch[k];
  return s;
}

NoiseGrid build_noise_grid(std::uint64_t seed, std::uint64_t path_index, std::size_t channels, double t0,
                           double t_end, std::size_t n_fine, const NoiseOptions& options) {
  if (!(t_end > t0)) throw std::invalid_argument("build_noise_grid: t_end must exceed t0");
  if (n_fine == 0) throw std::invalid_argument("build_noise_grid: n_fine must be at least 1");
  const double dt = (t_end - t0) / static_cast<double>(n_fine);
  const double scale = std::sqrt(dt);
  const double clip = 2.0 * std::sqrt(dt * std::abs(std::log(dt)));

  std::vector<std::vector<double>> inc(channels + 1);
  inc[0].assign(n_fine, dt);
  for (std::size_t r = 1; r <= channels; ++r) {
    const std::uint64_t key = stream_key(seed, path_index, r);
    auto& ch = inc[r];
    ch.resize(n_fine);
    for (std::size_t pair = 0; 2 * pair < n_fine; ++pair) {
      double z0 = 0.0, z1 = 0.0;
      normal_pair(key, pair, z0, z1);
      ch[2 * pair] = scale * z0;
      if (2 * pair + 1 < n_fine) ch[2 * pair + 1] = scale * z1;
    }
    if (options.truncate) {
      for (double& w : ch) w = std::clamp(w, -clip, clip);
    }
  }
  return NoiseGrid(t0, dt, std::move(inc), seed, path_index);
}

NoiseGrid coarsen(const NoiseGrid& grid, std::size_t factor) {
  if (factor == 0 || grid.n_fine() % factor != 0) {
    std::ostringstream os;
    os << "coarsen: factor " << factor << " does not divide n_fine " << grid.n_fine();
    throw std::invalid_argument(os.str());
  }
  const std::size_t n = grid.n_fine() / factor;
  const double dt = static_cast<double>(factor) * grid.dt_fine();
  std::vector<std::vector<double>> inc(grid.noise_channels() + 1);
  inc[0].assign(n, dt);
  for (std::size_t r = 1; r <= grid.noise_channels(); ++r) {
    inc[r].resize(n);
    for (std::size_t k = 0; k < n; ++k) inc[r][k] = grid.window_sum(r, k * factor, factor);
  }
  return NoiseGrid(grid.t0(), dt, std::move(inc), grid.seed(), grid.path_index());
}

std::size_t step_count(const NoiseGrid& grid, std::size_t fine_per_step) {
  if (fine_per_step == 0) throw std::invalid_argument("step_count: fine_per_step must be positive");
  return grid.n_fine() / fine_per_step;
}

std::vector<StepIncrements> step_windows(const NoiseGrid& grid, std::size_t fine_per_step, std::size_t step,
                                         std::span<const Fraction> split) {
  if (split.empty()) throw std::invalid_argument("step_windows: empty split");
  if (step >= step_count(grid, fine_per_step)) throw std::out_of_range("step_windows: step beyond grid");

  // Exact rational check that the fractions sum to one.
  std::int64_t num = 0, den = 1;
  for (const auto& f : split) {
    if (f.num <= 0 || f.den <= 0) throw std::invalid_argument("step_windows: fractions must be positive");
    num = num * f.den + static_cast<std::int64_t>(f.num) * den;
    den *= f.den;
    const std::int64_t g = std::gcd(num, den);
    num /= g;
    den /= g;
  }
  if (num != den) throw std::invalid_argument("step_windows: fractions must sum to 1");

  std::vector<StepIncrements> out;
  out.reserve(split.size());
  std::size_t begin = step * fine_per_step;
  for (const auto& f : split) {
    const std::size_t scaled = fine_per_step * static_cast<std::size_t>(f.num);
    if (scaled % static_cast<std::size_t>(f.den) != 0) {
      std::ostringstream os;
      os << "step_windows: window " << f.num << "/" << f.den << " of " << fine_per_step
         << " fine intervals does not land on the fine grid";
      throw std::invalid_argument(os.str());
    }
    const std::size_t count = scaled / static_cast<std::size_t>(f.den);
    StepIncrements w;
    w.delta.resize(grid.noise_channels() + 1);
    w.delta[0] = static_cast<double>(count) * grid.dt_fine();
    for (std::size_t r = 1; r <= grid.noise_channels(); ++r) w.delta[r] = grid.window_sum(r, begin, count);
    begin += count;
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace shs
