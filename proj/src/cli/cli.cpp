#include "shs/cli/cli.hpp"

#include "shs/harness/csv.hpp"
#include "shs/harness/diagnostics.hpp"
#include "shs/harness/experiments.hpp"
#include "shs/modelzoo/examples.hpp"
#include "shs/nls/nls.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

namespace shs {

namespace {

const std::vector<std::string> kCommands{"run", "order", "timing", "track", "nls", "check"};

/// CSV sink: a file, or standard output for "-".
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw UsageError("cannot open output file '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string out_path(const RunConfig& cfg) { return cfg.out_path.empty() ? cfg.command + ".csv" : cfg.out_path; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::vector<double> expand_gammas(const RunConfig& cfg, std::size_t channels) {
  if (cfg.gamma.size() == 1) return std::vector<double>(channels + 1, cfg.gamma.front());
  if (cfg.gamma.size() == channels + 1) return cfg.gamma;
  std::ostringstream os;
  os << "--gamma needs 1 or " << channels + 1 << " values, got " << cfg.gamma.size();
  throw UsageError(os.str());
}

SchemeOptions scheme_options(const RunConfig& cfg, const HamiltonianModel& model) {
  SchemeOptions o;
  o.gammas = expand_gammas(cfg, model.noise_channels());
  o.projection.tol = cfg.tol;
  o.projection.max_iter = cfg.max_iter;
  o.implicit.tol = cfg.tol;
  o.implicit.max_iter = cfg.max_iter;
  return o;
}

std::vector<SchemeId> schemes(const RunConfig& cfg) {
  std::vector<SchemeId> ids;
  for (const auto& s : cfg.schemes) ids.push_back(parse_scheme(s));
  return ids;
}

ExampleSpec example(const RunConfig& cfg) {
  return make_example(cfg.example, cfg.c.value_or(default_noise_scale(cfg.example)));
}

int cmd_run(const RunConfig& cfg, std::ostream& out) {
  const ExampleSpec ex = example(cfg);
  const SchemeId id = parse_scheme(cfg.schemes.front());
  const std::size_t steps = whole_steps(cfg.t_end, cfg.dt, "t-end");
  const NoiseGrid grid = build_noise_grid(cfg.seed, cfg.path_index, ex.model.noise_channels(), 0.0, cfg.t_end,
                                          steps * kFinePerStep);
  Stepper stepper(id, ex.model, scheme_options(cfg, ex.model));
  Sink sink(out_path(cfg));
  CsvWriter csv(sink.stream());
  std::vector<std::string> head{"t"};
  for (Eigen::Index i = 0; i < ex.model.dim(); ++i) head.push_back("x" + std::to_string(i + 1));
  for (Eigen::Index i = 0; i < ex.model.dim(); ++i) head.push_back("y" + std::to_string(i + 1));
  csv.header(head);
  const auto row = [&](double t, const PhaseState& z) {
    csv.field(t);
    for (Eigen::Index i = 0; i < z.dim(); ++i) csv.field(z.x[i]);
    for (Eigen::Index i = 0; i < z.dim(); ++i) csv.field(z.y[i]);
    csv.end_row();
  };
  PhaseState z = ex.z0;
  row(0.0, z);
  int max_iters = 0;
  for (std::size_t n = 0; n < steps; ++n) {
    ProjectionReport rep;
    try {
      z = stepper.step(z, grid, kFinePerStep, n, &rep);
    } catch (const NoConvergence& e) {
      throw StepFailure(e, n);
    }
    max_iters = std::max(max_iters, rep.iterations);
    if ((n + 1) % cfg.stride == 0 || n + 1 == steps) row(static_cast<double>(n + 1) * cfg.dt, z);
  }
  out << "run " << ex.name << ' ' << to_string(id) << " steps=" << steps << " final x1=" << fmt(z.x[0])
      << " y1=" << fmt(z.y[0]);
  if (stepper.projected()) out << " max_newton_iters=" << max_iters;
  out << '\n';
  return 0;
}

int cmd_order(const RunConfig& cfg, std::ostream& out) {
  const ExampleSpec ex = example(cfg);
  std::vector<OrderReport> reports;
  for (SchemeId id : schemes(cfg)) {
    ConvergenceSpec spec;
    spec.scheme = id;
    spec.t_end = cfg.t_end;
    spec.dts = cfg.dts;
    spec.ref_dt = cfg.ref_dt;
    spec.paths = cfg.paths;
    spec.seed = cfg.seed;
    spec.options = scheme_options(cfg, ex.model);
    spec.threads = cfg.threads;
    reports.push_back(ms_error(ex.model, ex.z0, spec));
  }
  Sink sink(out_path(cfg));
  CsvWriter csv(sink.stream());
  std::vector<std::string> head{"scheme", "dt", "err_x", "err_y", "err", "se_x", "se_y", "se"};
  if (!cfg.no_wall) head.push_back("wall_s");
  for (const char* s : {"slope_x", "slope_y", "slope", "endpoint_slope"}) head.push_back(s);
  csv.header(head);
  out << "order " << ex.name;
  for (const auto& r : reports) {
    for (std::size_t k = 0; k < r.dts.size(); ++k) {
      csv.field(to_string(r.scheme)).field(r.dts[k]).field(r.err_x[k]).field(r.err_y[k]).field(r.err[k]);
      csv.field(r.se_x[k]).field(r.se_y[k]).field(r.se[k]);
      if (!cfg.no_wall) csv.field(r.wall_s[k]);
      csv.field(r.slope_x).field(r.slope_y).field(r.slope).field(r.endpoint_slope);
      csv.end_row();
    }
    out << ' ' << to_string(r.scheme) << " slope=" << fmt(r.slope);
  }
  out << '\n';
  return 0;
}

int cmd_timing(const RunConfig& cfg, std::ostream& out) {
  const ExampleSpec ex = example(cfg);
  TimingSpec spec;
  spec.schemes = schemes(cfg);
  spec.t_end = cfg.t_end;
  spec.dts = cfg.dts;
  spec.ref_dt = cfg.ref_dt;
  spec.paths = cfg.paths;
  spec.seed = cfg.seed;
  spec.options = scheme_options(cfg, ex.model);
  spec.repeats = cfg.repeats;
  const auto rows = cpu_compare(ex.model, ex.z0, spec);
  Sink sink(out_path(cfg));
  CsvWriter csv(sink.stream());
  std::vector<std::string> head{"scheme", "dt", "err"};
  if (!cfg.no_wall) head.push_back("wall_s");
  csv.header(head);
  out << "timing " << ex.name;
  for (const auto& r : rows) {
    csv.field(to_string(r.scheme)).field(r.dt).field(r.err);
    if (!cfg.no_wall) csv.field(r.wall_s);
    csv.end_row();
    out << ' ' << to_string(r.scheme) << '@' << fmt(r.dt) << '=' << fmt(r.wall_s) << 's';
  }
  out << '\n';
  return 0;
}

int cmd_track(const RunConfig& cfg, std::ostream& out) {
  const ExampleSpec ex = example(cfg);
  TrackSpec spec;
  spec.scheme = parse_scheme(cfg.schemes.front());
  spec.dt = cfg.dt;
  spec.t_end = cfg.t_end;
  spec.seed = cfg.seed;
  spec.path_index = cfg.path_index;
  spec.names = cfg.invariants.empty() ? ex.invariant_names() : cfg.invariants;
  spec.options = scheme_options(cfg, ex.model);
  spec.stride = cfg.stride;
  const TrackResult r = track(ex, spec);
  Sink sink(out_path(cfg));
  CsvWriter csv(sink.stream());
  csv.header({"series", "t", "value"});
  out << "track " << ex.name << ' ' << to_string(spec.scheme);
  for (const auto& s : r.series) {
    double worst = 0.0;
    for (std::size_t k = 0; k < s.value.size(); ++k) {
      csv.field(s.name).field(r.t[k]).field(s.value[k]);
      csv.end_row();
      worst = std::max(worst, std::abs(s.value[k]));
    }
    out << ' ' << s.name << "_max=" << fmt(worst);
  }
  out << '\n';
  return 0;
}

int cmd_nls(const RunConfig& cfg, std::ostream& out) {
  const NlsLattice lat = lattice_with_spacing(-5.0, 5.0, cfg.h, cfg.modes);
  const NlsRecipe recipe = parse_nls_recipe(cfg.recipe);
  const std::size_t steps = whole_steps(cfg.t_end, cfg.dt, "t-end");
  const NoiseGrid grid = build_noise_grid(cfg.seed, cfg.path_index, static_cast<std::size_t>(cfg.modes), 0.0,
                                          cfg.t_end, steps * nls_substeps(recipe));
  ProjectionConfig pc;
  pc.tol = cfg.tol;
  pc.max_iter = cfg.max_iter;
  NlsRunOptions opt;
  opt.project = !cfg.no_project;
  opt.keep_fields = !cfg.fields_path.empty();
  const NlsRun run = nls_simulate(lat, recipe, nls_initial(lat), grid, pc, opt);

  Sink sink(out_path(cfg));
  CsvWriter csv(sink.stream());
  csv.header({"t", "charge", "defect", "newton_iters"});
  const double c0 = run.charge.front();
  double drift = 0.0;
  for (std::size_t k = 0; k < run.t.size(); ++k) {
    drift = std::max(drift, std::abs(run.charge[k] - c0) / c0);
    if (k % cfg.stride != 0 && k + 1 != run.t.size()) continue;
    csv.field(run.t[k]).field(run.charge[k]).field(run.defect[k]).field(run.newton_iters[k]);
    csv.end_row();
  }
  if (opt.keep_fields) {
    Sink fsink(cfg.fields_path);
    CsvWriter f(fsink.stream());
    f.header({"t", "x", "P", "Q"});
    for (std::size_t k = 0; k < run.fields.size(); ++k) {
      if (k % cfg.stride != 0 && k + 1 != run.fields.size()) continue;
      for (Eigen::Index i = 0; i < lat.n; ++i) {
        f.field(run.t[k]).field(lat.x[i]).field(run.fields[k].p[i]).field(run.fields[k].q[i]);
        f.end_row();
      }
    }
  }
  out << "nls " << to_string(recipe) << " steps=" << steps << " nodes=" << lat.n
      << " max_rel_charge_drift=" << fmt(drift) << '\n';
  return 0;
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const ExampleSpec ex = example(cfg);
  DiagnosticsOptions opt;
  opt.seed = cfg.seed;
  const auto checks = run_diagnostics(ex, opt);
  Sink sink(out_path(cfg));
  CsvWriter csv(sink.stream());
  csv.header({"check", "value", "threshold", "passed"});
  std::size_t passed = 0;
  std::string failed;
  for (const auto& c : checks) {
    csv.field(c.name).field(c.value).field(c.threshold).field(c.passed ? "yes" : "no");
    csv.end_row();
    if (c.passed) {
      ++passed;
    } else {
      failed += ' ' + c.name;
    }
  }
  out << "check " << ex.name << ' ' << passed << '/' << checks.size() << " passed";
  if (!failed.empty()) out << "; failed:" << failed;
  out << '\n';
  return passed == checks.size() ? 0 : 1;
}

}  // namespace

RunConfig parse_args(const std::vector<std::string>& argv) {
  RunConfig cfg;
  CLI::App app{"Symplectic integrators for stochastic Hamiltonian systems", "shs"};
  app.set_help_flag("--help", "Print this help and exit");
  app.add_option("command", cfg.command, "run | order | timing | track | nls | check")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("--example", cfg.example, "ex1 | ex2 | ex3 | ex4")
      ->check(CLI::IsMember(example_names()))
      ->capture_default_str();
  std::string scheme;
  std::vector<std::string> scheme_list;
  const std::vector<std::string> scheme_names{"ses-sp-1", "ses-sp-2", "midpoint", "sympeuler"};
  auto* one = app.add_option("--scheme", scheme, "ses-sp-1 | ses-sp-2 | midpoint | sympeuler (default ses-sp-1)")
                  ->check(CLI::IsMember(scheme_names));
  auto* many = app.add_option("--schemes", scheme_list, "Comma separated schemes (order, timing)")
                   ->delimiter(',')
                   ->check(CLI::IsMember(scheme_names));
  one->excludes(many);
  app.add_option("--dt", cfg.dt, "Step size (run, track, nls)")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--dts", cfg.dts, "Comma separated coarse steps (order, timing; default 2^-5..2^-8)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  app.add_option("--ref-dt", cfg.ref_dt, "Reference step; 0 means min(dts)/16")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--t-end", cfg.t_end, "Horizon")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--paths", cfg.paths, "Monte Carlo paths")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--seed", cfg.seed, "Noise seed")->capture_default_str();
  app.add_option("--path-index", cfg.path_index, "Noise path of single-path commands")->capture_default_str();
  app.add_option("--gamma", cfg.gamma, "Restraint constant, one value or one per channel 0..m")
      ->delimiter(',')
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--c", cfg.c, "Noise scale (default per example: ex1 0.15, ex2 0.5, ex3 0.5, ex4 1)");
  app.add_option("--tol", cfg.tol, "Newton tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--max-iter", cfg.max_iter, "Newton iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--out", cfg.out_path, "CSV output path, - for stdout (default <command>.csv)");
  app.add_option("--fields", cfg.fields_path, "NLS field dump path (t, x, P, Q)");
  app.add_option("--h", cfg.h, "NLS grid spacing")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--modes", cfg.modes, "NLS noise modes")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--recipe", cfg.recipe, "NLS composition: ab | ba | strang-ab | strang-ba")
      ->check(CLI::IsMember({"ab", "ba", "strang-ab", "strang-ba"}))
      ->capture_default_str();
  app.add_option("--invariants", cfg.invariants, "Comma separated series for track (default all, plus defect)")
      ->delimiter(',');
  app.add_option("--stride", cfg.stride, "Write every stride-th step")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--threads", cfg.threads, "Worker threads for order, 0 = all cores")->capture_default_str();
  app.add_option("--repeats", cfg.repeats, "Timing repetitions (minimum is kept)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--no-project", cfg.no_project, "Bare composition without projection (nls)");
  app.add_flag("--no-wall", cfg.no_wall, "Omit wall-clock columns (byte-reproducible CSV)");
  app.set_config("--config", "", "File of key = value lines; flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);

  std::vector<std::string> args(argv.rbegin(), argv.rend() - (argv.empty() ? 0 : 1));
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  if (!scheme.empty()) cfg.schemes = {scheme};
  if (!scheme_list.empty()) cfg.schemes = scheme_list;
  if (cfg.gamma.empty()) throw UsageError("--gamma needs at least one value");
  if (cfg.dts.empty()) throw UsageError("--dts needs at least one value");
  const bool single_step = cfg.command == "run" || cfg.command == "track" || cfg.command == "nls";
  if (single_step && cfg.t_end < cfg.dt) throw UsageError("--t-end must be at least --dt");
  if (cfg.command == "order" && cfg.paths < 2) throw UsageError("order needs --paths >= 2");
  if (single_step && cfg.schemes.size() != 1) throw UsageError(cfg.command + " takes a single --scheme");
  return cfg;
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  static const std::map<std::string, std::function<int(const RunConfig&, std::ostream&)>> table{
      {"run", cmd_run},     {"order", cmd_order}, {"timing", cmd_timing},
      {"track", cmd_track}, {"nls", cmd_nls},     {"check", cmd_check}};
  // With --out - the CSV owns standard output, so the summary moves to err.
  // It is collected first so it never interleaves with CSV rows.
  std::ostringstream summary;
  const auto flush = [&](int code) {
    (out_path(cfg) == "-" ? err : out) << summary.str();
    return code;
  };
  try {
    const auto it = table.find(cfg.command);
    if (it == table.end()) throw UsageError("unknown command '" + cfg.command + "'");
    return flush(it->second(cfg, summary));
  } catch (const NoConvergence& e) {
    // PathFailure and StepFailure already name the path and step.
    err << "error: no convergence: " << e.what() << " (iterations " << e.iterations() << ", last delta "
        << e.last_delta() << ")\n";
    return 1;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(std::vector<std::string>(argv, argv + argc));
  } catch (const HelpRequested& h) {
    out << h.what();
    return 0;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  }
  return dispatch(cfg, out, err);
}

}  // namespace shs
