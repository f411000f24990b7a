#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace shs {

/// Invalid command line or config file; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// --help was given; what() holds the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  /// run, order, timing, track, nls or check.
  std::string command;
  std::string example = "ex1";
  std::vector<std::string> schemes{"ses-sp-1"};
  double dt = 1e-2;
  /// Coarse steps of order and timing.
  std::vector<double> dts{1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
  /// 0 means min(dts) / 16.
  double ref_dt = 0.0;
  double t_end = 1.0;
  std::size_t paths = 200;
  std::uint64_t seed = 1;
  std::uint64_t path_index = 0;
  /// One value applies to every channel; otherwise one per channel 0..m.
  std::vector<double> gamma{0.0};
  /// Noise scale; unset means the example default.
  std::optional<double> c;
  double tol = 1e-12;
  int max_iter = 50;
  /// CSV destination; "-" is standard output. Empty means "<command>.csv".
  std::string out_path;
  /// Optional NLS field dump (long format t, x, P, Q).
  std::string fields_path;
  double h = 1.0;
  int modes = 10;
  std::string recipe = "strang-ab";
  /// Series for track; empty means every registered invariant.
  std::vector<std::string> invariants;
  std::size_t stride = 1;
  unsigned threads = 0;
  int repeats = 3;
  /// Run the bare composition without projection (track, nls).
  bool no_project = false;
  /// Drop wall-clock columns so output is byte-reproducible.
  bool no_wall = false;
};

/// argv[0] is the program name. Throws UsageError or HelpRequested.
RunConfig parse_args(const std::vector<std::string>& argv);

/// Runs the command, writes CSV output and prints a one-line summary to
/// `out`. Returns 0 on success, 1 on numerical failure or failed checks,
/// 2 on a usage error detected while running.
int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// parse_args + dispatch with exit codes 0/1/2.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace shs
