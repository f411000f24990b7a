#include "shs/harness/experiments.hpp"

#include "shs/harness/stats.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace shs {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t ratio(double big, double small, const char* what) {
  const double q = big / small;
  const double r = std::round(q);
  if (r < 1.0 || std::abs(q - r) > 1e-9 * r) {
    std::ostringstream os;
    os << what << ": " << big << " is not an integer multiple of " << small;
    throw std::invalid_argument(os.str());
  }
  return static_cast<std::size_t>(r);
}

double resolve_ref_dt(double ref_dt, const std::vector<double>& dts) {
  if (dts.empty()) throw std::invalid_argument("no step sizes given");
  for (double dt : dts) {
    if (!(dt > 0.0)) throw std::invalid_argument("step sizes must be positive");
  }
  return ref_dt > 0.0 ? ref_dt : *std::min_element(dts.begin(), dts.end()) / 16.0;
}

/// Runs the stepper and tags failures with path and dt.
PhaseState run_path(Stepper& stepper, const PhaseState& z0, const NoiseGrid& grid, std::size_t path, double dt) {
  try {
    return stepper.run(z0, grid, kFinePerStep);
  } catch (const StepFailure& e) {
    throw PathFailure(e, path, dt, e.step());
  }
}

unsigned resolve_threads(unsigned threads, std::size_t work) {
  unsigned t = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(work, 1)));
}

}  // namespace

std::size_t whole_steps(double t_end, double dt, const char* what) { return ratio(t_end, dt, what); }

PathFailure::PathFailure(const NoConvergence& cause, std::size_t path, double dt, std::size_t step)
    : NoConvergence([&] {
        std::ostringstream os;
        os << cause.what() << " (path " << path << ", dt " << dt << ")";
        return os.str();
      }(),
                    cause.iterations(), cause.last_delta()),
      path_(path),
      dt_(dt),
      step_(step) {}

OrderReport ms_error(const HamiltonianModel& model, const PhaseState& z0, const ConvergenceSpec& spec) {
  if (spec.paths < 2) throw std::invalid_argument("ms_error: need at least 2 paths");
  const double ref_dt = resolve_ref_dt(spec.ref_dt, spec.dts);
  const std::size_t n_ref = whole_steps(spec.t_end, ref_dt, "ms_error t_end");
  std::vector<std::size_t> factors;
  for (double dt : spec.dts) {
    factors.push_back(ratio(dt, ref_dt, "ms_error dt"));
    whole_steps(spec.t_end, dt, "ms_error t_end");
  }
  const std::size_t nd = spec.dts.size();

  // Per path: squared X and Y errors for each dt, and stepping seconds.
  struct PathResult {
    std::vector<double> ex, ey, secs;
  };
  std::vector<PathResult> results(spec.paths);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    Stepper stepper(spec.scheme, model, spec.options);
    for (;;) {
      const std::size_t p = next.fetch_add(1);
      if (p >= spec.paths) return;
      try {
        const NoiseGrid grid =
            build_noise_grid(spec.seed, p, model.noise_channels(), 0.0, spec.t_end, kFinePerStep * n_ref);
        const PhaseState ref = run_path(stepper, z0, grid, p, ref_dt);
        PathResult& out = results[p];
        for (std::size_t k = 0; k < nd; ++k) {
          const NoiseGrid coarse = factors[k] == 1 ? grid : coarsen(grid, factors[k]);
          const auto start = Clock::now();
          const PhaseState z = run_path(stepper, z0, coarse, p, spec.dts[k]);
          out.secs.push_back(seconds_since(start));
          out.ex.push_back((z.x - ref.x).squaredNorm());
          out.ey.push_back((z.y - ref.y).squaredNorm());
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(spec.paths);
        return;
      }
    }
  };

  const unsigned nt = resolve_threads(spec.threads, spec.paths);
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  OrderReport rep;
  rep.scheme = spec.scheme;
  rep.dts = spec.dts;
  for (std::size_t k = 0; k < nd; ++k) {
    std::vector<double> sx(spec.paths), sy(spec.paths), s(spec.paths);
    double secs = 0.0;
    for (std::size_t p = 0; p < spec.paths; ++p) {
      sx[p] = results[p].ex[k];
      sy[p] = results[p].ey[k];
      s[p] = sx[p] + sy[p];
      secs += results[p].secs[k];
    }
    const auto ex = rms_with_jackknife(sx), ey = rms_with_jackknife(sy), e = rms_with_jackknife(s);
    rep.err_x.push_back(ex.value);
    rep.err_y.push_back(ey.value);
    rep.err.push_back(e.value);
    rep.se_x.push_back(ex.se);
    rep.se_y.push_back(ey.se);
    rep.se.push_back(e.se);
    rep.wall_s.push_back(secs);
  }
  const auto positive = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double e) { return e > 0.0; });
  };
  const auto fit = [&](const std::vector<double>& e, double& slope, double& endpoint) {
    if (nd >= 2 && positive(e)) {
      slope = loglog_slope(rep.dts, e);
      endpoint = endpoint_slope(rep.dts, e);
    } else {
      slope = endpoint = std::nan("");
    }
  };
  fit(rep.err_x, rep.slope_x, rep.endpoint_slope_x);
  fit(rep.err_y, rep.slope_y, rep.endpoint_slope_y);
  fit(rep.err, rep.slope, rep.endpoint_slope);
  return rep;
}

std::vector<TimingRow> cpu_compare(const HamiltonianModel& model, const PhaseState& z0, const TimingSpec& spec) {
  if (spec.schemes.empty()) throw std::invalid_argument("cpu_compare: no schemes");
  if (spec.paths < 1 || spec.repeats < 1) throw std::invalid_argument("cpu_compare: paths and repeats must be >= 1");
  const double ref_dt = resolve_ref_dt(spec.ref_dt, spec.dts);
  const std::size_t n_ref = whole_steps(spec.t_end, ref_dt, "cpu_compare t_end");

  std::vector<NoiseGrid> grids;
  grids.reserve(spec.paths);
  for (std::size_t p = 0; p < spec.paths; ++p) {
    grids.push_back(build_noise_grid(spec.seed, p, model.noise_channels(), 0.0, spec.t_end, kFinePerStep * n_ref));
  }
  std::vector<TimingRow> rows;
  for (const SchemeId id : spec.schemes) {
    Stepper stepper(id, model, spec.options);
    std::vector<PhaseState> refs;
    for (std::size_t p = 0; p < spec.paths; ++p) refs.push_back(run_path(stepper, z0, grids[p], p, ref_dt));
    for (const double dt : spec.dts) {
      const std::size_t factor = ratio(dt, ref_dt, "cpu_compare dt");
      whole_steps(spec.t_end, dt, "cpu_compare t_end");
      std::vector<NoiseGrid> coarse;
      coarse.reserve(spec.paths);
      for (const auto& g : grids) coarse.push_back(coarsen(g, factor));

      std::vector<double> sq(spec.paths);
      double best = std::numeric_limits<double>::infinity();
      for (int rep = 0; rep < spec.repeats; ++rep) {
        const auto start = Clock::now();
        for (std::size_t p = 0; p < spec.paths; ++p) {
          const PhaseState z = run_path(stepper, z0, coarse[p], p, dt);
          sq[p] = (z.x - refs[p].x).squaredNorm() + (z.y - refs[p].y).squaredNorm();
        }
        best = std::min(best, seconds_since(start));
      }
      rows.push_back({id, dt, rms_with_jackknife(sq).value, best});
    }
  }
  return rows;
}

TrackResult track(const ExampleSpec& example, const TrackSpec& spec) {
  if (spec.stride == 0) throw std::invalid_argument("track: stride must be positive");
  const std::size_t steps = whole_steps(spec.t_end, spec.dt, "track t_end");
  Stepper stepper(spec.scheme, example.model, spec.options);

  enum class Kind { Invariant, DefectPre, DefectPost };
  struct Column {
    Kind kind;
    const NamedFunctional* fn;
    double i0;
  };
  std::vector<Column> cols;
  TrackResult res;
  for (const auto& name : spec.names) {
    if (name == "defect" || name == "residual") {
      if (!stepper.projected()) {
        throw std::invalid_argument("track: '" + name + "' is only defined for the projected ses-sp schemes");
      }
      cols.push_back({name == "defect" ? Kind::DefectPre : Kind::DefectPost, nullptr, 0.0});
    } else {
      const NamedFunctional& fn = example.invariant(name);
      cols.push_back({Kind::Invariant, &fn, fn.eval(example.z0)});
    }
    res.series.push_back({name, {}});
  }
  if (cols.empty()) throw std::invalid_argument("track: no series requested");

  const NoiseGrid grid = build_noise_grid(spec.seed, spec.path_index, example.model.noise_channels(), 0.0,
                                          spec.t_end, kFinePerStep * steps);
  ProjectionReport report;
  const auto record = [&](std::size_t n, const PhaseState& z, bool initial) {
    res.t.push_back(static_cast<double>(n) * spec.dt);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      double v = 0.0;
      switch (cols[k].kind) {
        case Kind::Invariant: {
          const double i = cols[k].fn->eval(z);
          v = cols[k].i0 != 0.0 ? (i - cols[k].i0) / std::abs(cols[k].i0) : i - cols[k].i0;
          break;
        }
        case Kind::DefectPre: v = initial ? 0.0 : report.defect_pre; break;
        case Kind::DefectPost: v = initial ? 0.0 : report.residual; break;
      }
      res.series[k].value.push_back(v);
    }
  };

  PhaseState z = example.z0;
  record(0, z, true);
  for (std::size_t n = 0; n < steps; ++n) {
    try {
      z = stepper.step(z, grid, kFinePerStep, n, &report);
    } catch (const NoConvergence& e) {
      throw StepFailure(e, n);
    }
    if ((n + 1) % spec.stride == 0 || n + 1 == steps) record(n + 1, z, false);
  }
  res.final_state = z;
  return res;
}

}  // namespace shs
