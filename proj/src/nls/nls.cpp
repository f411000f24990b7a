#include "shs/nls/nls.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace shs {

Vector NlsLattice::d_plus(const Vector& u) const {
  require_same_dim(n, u.size(), "NlsLattice::d_plus");
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = ((i + 1 < n ? u[i + 1] : 0.0) - u[i]) / h;
  return out;
}

Vector NlsLattice::d_minus(const Vector& u) const {
  require_same_dim(n, u.size(), "NlsLattice::d_minus");
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = (u[i] - (i > 0 ? u[i - 1] : 0.0)) / h;
  return out;
}

void NlsLattice::laplacian(const Eigen::Ref<const Vector>& u, Eigen::Ref<Vector> out) const {
  // Row i of D+ D-: (u_{i+1} - 2 u_i + u_{i-1}) / h^2, last row (u_{n-1} - u_n) / h^2.
  const double ih2 = 1.0 / (h * h);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double left = i > 0 ? u[i - 1] : 0.0;
    const double dm_i = u[i] - left;
    const double dm_next = i + 1 < n ? u[i + 1] - u[i] : 0.0;
    out[i] = (dm_next - dm_i) * ih2;
  }
}

NlsLattice build_lattice(double x_left, double x_right, Eigen::Index n_interior, Eigen::Index modes) {
  if (!(x_right > x_left)) throw std::invalid_argument("build_lattice: degenerate domain");
  if (n_interior < 1) throw std::invalid_argument("build_lattice: need at least one interior node");
  if (modes < 1) throw std::invalid_argument("build_lattice: need at least one noise mode");
  NlsLattice lat;
  lat.x_left = x_left;
  lat.x_right = x_right;
  lat.n = n_interior;
  lat.h = (x_right - x_left) / static_cast<double>(n_interior + 1);
  lat.x.resize(n_interior);
  for (Eigen::Index i = 0; i < n_interior; ++i) lat.x[i] = x_left + static_cast<double>(i + 1) * lat.h;
  lat.modes = modes;
  lat.e.resize(n_interior, modes);
  lat.lam_sqrt.resize(modes);
  const double norm = 1.0 / std::sqrt(5.0);
  for (Eigen::Index k = 0; k < modes; ++k) {
    const double kk = static_cast<double>(k + 1);
    lat.lam_sqrt[k] = 1.0 / (kk * kk * kk);
    for (Eigen::Index i = 0; i < n_interior; ++i) lat.e(i, k) = norm * std::sin(kk * std::numbers::pi * lat.x[i]);
  }
  return lat;
}

NlsLattice lattice_with_spacing(double x_left, double x_right, double h, Eigen::Index modes) {
  if (!(h > 0.0)) throw std::invalid_argument("lattice_with_spacing: h must be positive");
  const double cells = (x_right - x_left) / h;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * rounded || rounded < 2.0) {
    std::ostringstream os;
    os << "lattice_with_spacing: h = " << h << " does not divide [" << x_left << ", " << x_right
       << "] into at least 2 cells";
    throw std::invalid_argument(os.str());
  }
  return build_lattice(x_left, x_right, static_cast<Eigen::Index>(rounded) - 1, modes);
}

Vector noise_vector(const NlsLattice& lat, const Vector& dbeta) {
  require_same_dim(lat.modes, dbeta.size(), "noise_vector");
  return lat.e * lat.lam_sqrt.cwiseProduct(dbeta);
}

NlsExtendedState NlsExtendedState::lift(const NlsState& s) {
  require_same_dim(s.q.size(), s.p.size(), "NlsExtendedState::lift");
  NlsExtendedState e;
  e.packed.resize(4 * s.q.size());
  e.packed << s.q, s.q, s.p, s.p;
  return e;
}

double NlsExtendedState::defect_norm() const {
  return std::sqrt((q() - x()).squaredNorm() + (p() - y()).squaredNorm());
}

namespace {

NlsExtendedState single_subflow(const NlsLattice& lat, const NlsExtendedState& s, double tau, const Vector& dbeta,
                                bool is_a) {
  require_same_dim(4 * lat.n, s.packed.size(), is_a ? "subflow_a" : "subflow_b");
  const Vector w = noise_vector(lat, dbeta);
  const Eigen::Index n = lat.n;
  NlsExtendedState out = s;
  Vector rho(n), l1(n), l2(n);
  auto q = out.packed.segment(0, n);
  auto x = out.packed.segment(n, n);
  auto p = out.packed.segment(2 * n, n);
  auto y = out.packed.segment(3 * n, n);
  if (is_a) {
    rho = q.array().square() + y.array().square();
    lat.laplacian(q, l1);
    lat.laplacian(y, l2);
    p.array() += -tau * (l1.array() + rho.array() * q.array()) + q.array() * w.array();
    x.array() += tau * (l2.array() + rho.array() * y.array()) - y.array() * w.array();
  } else {
    rho = p.array().square() + x.array().square();
    lat.laplacian(p, l1);
    lat.laplacian(x, l2);
    q.array() += tau * (l1.array() + rho.array() * p.array()) - p.array() * w.array();
    y.array() += -tau * (l2.array() + rho.array() * x.array()) + x.array() * w.array();
  }
  if (!out.packed.allFinite()) throw std::domain_error(is_a ? "subflow_a: non-finite state" : "subflow_b: non-finite state");
  return out;
}

}  // namespace

NlsExtendedState subflow_a(const NlsLattice& lat, const NlsExtendedState& s, double tau, const Vector& dbeta) {
  return single_subflow(lat, s, tau, dbeta, true);
}

NlsExtendedState subflow_b(const NlsLattice& lat, const NlsExtendedState& s, double tau, const Vector& dbeta) {
  return single_subflow(lat, s, tau, dbeta, false);
}

NlsRecipe parse_nls_recipe(const std::string& name) {
  if (name == "ab") return NlsRecipe::AB;
  if (name == "ba") return NlsRecipe::BA;
  if (name == "strang-ab") return NlsRecipe::StrangAB;
  if (name == "strang-ba") return NlsRecipe::StrangBA;
  throw std::invalid_argument("unknown NLS recipe '" + name + "' (expected ab, ba, strang-ab or strang-ba)");
}

std::string to_string(NlsRecipe r) {
  switch (r) {
    case NlsRecipe::AB: return "ab";
    case NlsRecipe::BA: return "ba";
    case NlsRecipe::StrangAB: return "strang-ab";
    case NlsRecipe::StrangBA: return "strang-ba";
  }
  return "?";
}

std::size_t nls_substeps(NlsRecipe r) { return (r == NlsRecipe::StrangAB || r == NlsRecipe::StrangBA) ? 2 : 1; }

NlsComposer::NlsComposer(const NlsLattice& lat, NlsRecipe recipe) : lat_(&lat), recipe_(recipe) {
  rho_.resize(lat.n);
  lap1_.resize(lat.n);
  lap2_.resize(lat.n);
}

void NlsComposer::load_step(const NoiseGrid& grid, std::size_t fine_per_step, std::size_t step) {
  if (grid.noise_channels() != static_cast<std::size_t>(lat_->modes)) {
    throw std::invalid_argument("NlsComposer: grid must carry one channel per noise mode");
  }
  if (fine_per_step % nls_substeps(recipe_) != 0) {
    throw std::invalid_argument("NlsComposer: step does not hold a whole number of recipe windows");
  }
  const auto to_stage = [&](bool is_a, const StepIncrements& inc) {
    Vector dbeta(lat_->modes);
    for (Eigen::Index k = 0; k < lat_->modes; ++k) dbeta[k] = inc.delta[static_cast<std::size_t>(k) + 1];
    return StageData{is_a, inc.tau(), noise_vector(*lat_, dbeta)};
  };
  static const Fraction whole[] = {{1, 1}};
  static const Fraction halves[] = {{1, 2}, {1, 2}};
  stages_.clear();
  switch (recipe_) {
    case NlsRecipe::AB:
    case NlsRecipe::BA: {
      const auto full = step_windows(grid, fine_per_step, step, whole);
      const bool a_first = recipe_ == NlsRecipe::AB;
      stages_.push_back(to_stage(a_first, full[0]));
      stages_.push_back(to_stage(!a_first, full[0]));
      break;
    }
    case NlsRecipe::StrangAB:
    case NlsRecipe::StrangBA: {
      const auto full = step_windows(grid, fine_per_step, step, whole);
      const auto half = step_windows(grid, fine_per_step, step, halves);
      const bool outer_a = recipe_ == NlsRecipe::StrangAB;
      stages_.push_back(to_stage(outer_a, half[0]));
      stages_.push_back(to_stage(!outer_a, full[0]));
      stages_.push_back(to_stage(outer_a, half[1]));
      break;
    }
  }
}

void NlsComposer::apply_a(Vector& packed, const StageData& st) {
  const Eigen::Index n = lat_->n;
  auto q = packed.segment(0, n);
  auto x = packed.segment(n, n);
  auto p = packed.segment(2 * n, n);
  auto y = packed.segment(3 * n, n);
  rho_ = q.array().square() + y.array().square();
  lat_->laplacian(q, lap1_);
  lat_->laplacian(y, lap2_);
  p.array() += -st.tau * (lap1_.array() + rho_.array() * q.array()) + q.array() * st.w.array();
  x.array() += st.tau * (lap2_.array() + rho_.array() * y.array()) - y.array() * st.w.array();
}

void NlsComposer::apply_b(Vector& packed, const StageData& st) {
  const Eigen::Index n = lat_->n;
  auto q = packed.segment(0, n);
  auto x = packed.segment(n, n);
  auto p = packed.segment(2 * n, n);
  auto y = packed.segment(3 * n, n);
  rho_ = p.array().square() + x.array().square();
  lat_->laplacian(p, lap1_);
  lat_->laplacian(x, lap2_);
  q.array() += st.tau * (lap1_.array() + rho_.array() * p.array()) - p.array() * st.w.array();
  y.array() += -st.tau * (lap2_.array() + rho_.array() * x.array()) + x.array() * st.w.array();
}

void NlsComposer::apply(Vector& packed) {
  if (stages_.empty()) throw std::logic_error("NlsComposer::apply: no increments loaded");
  require_same_dim(4 * lat_->n, packed.size(), "NlsComposer::apply");
  for (const auto& st : stages_) {
    if (st.is_a) apply_a(packed, st);
    else apply_b(packed, st);
  }
  if (!packed.allFinite()) throw std::domain_error("NlsComposer::apply: non-finite state");
}

NlsStepResult nls_step(NlsComposer& composer, const NlsState& s, const ProjectionConfig& cfg) {
  const NlsExtendedState base = NlsExtendedState::lift(s);
  Vector out;
  NlsStepResult res;
  res.report = solve_symmetric_projection([&](Vector& v) { composer.apply(v); }, base.packed, cfg, out);
  const Eigen::Index n = s.q.size();
  res.state.q = 0.5 * (out.segment(0, n) + out.segment(n, n));
  res.state.p = 0.5 * (out.segment(2 * n, n) + out.segment(3 * n, n));
  return res;
}

NlsStepResult nls_step(const NlsLattice& lat, NlsRecipe recipe, const NlsState& s, const NoiseGrid& grid,
                       std::size_t step, const ProjectionConfig& cfg, std::size_t fine_per_step) {
  require_same_dim(lat.n, s.q.size(), "nls_step");
  NlsComposer comp(lat, recipe);
  comp.load_step(grid, fine_per_step == 0 ? nls_substeps(recipe) : fine_per_step, step);
  return nls_step(comp, s, cfg);
}

double charge(const NlsState& s) {
  require_same_dim(s.q.size(), s.p.size(), "charge");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.q.size(); ++i) acc += s.p[i] * s.p[i] + s.q[i] * s.q[i];
  return acc;
}

NlsState nls_initial(const NlsLattice& lat) {
  NlsState s;
  s.q.resize(lat.n);
  s.p.resize(lat.n);
  for (Eigen::Index i = 0; i < lat.n; ++i) {
    const double sech = 1.0 / std::cosh(lat.x[i]);
    s.p[i] = std::cos(2.0 * lat.x[i]) * sech;
    s.q[i] = std::sin(2.0 * lat.x[i]) * sech;
  }
  return s;
}

NlsRun nls_simulate(const NlsLattice& lat, NlsRecipe recipe, const NlsState& init, const NoiseGrid& grid,
                    const ProjectionConfig& cfg, const NlsRunOptions& options) {
  require_same_dim(lat.n, init.q.size(), "nls_simulate");
  const std::size_t fps = nls_substeps(recipe);
  const std::size_t steps = step_count(grid, fps);
  const double dt = static_cast<double>(fps) * grid.dt_fine();
  NlsComposer comp(lat, recipe);
  NlsRun run;
  const auto record = [&](std::size_t n, const NlsState& s, double defect, int iters) {
    run.t.push_back(grid.t0() + static_cast<double>(n) * dt);
    run.charge.push_back(charge(s));
    run.defect.push_back(defect);
    run.newton_iters.push_back(iters);
    if (options.keep_fields) run.fields.push_back(s);
  };
  NlsState s = init;
  record(0, s, 0.0, 0);
  NlsExtendedState raw = NlsExtendedState::lift(init);
  for (std::size_t k = 0; k < steps; ++k) {
    comp.load_step(grid, fps, k);
    if (options.project) {
      NlsStepResult res;
      try {
        res = nls_step(comp, s, cfg);
      } catch (const NoConvergence& e) {
        throw StepFailure(e, k);
      }
      s = std::move(res.state);
      record(k + 1, s, res.report.residual, res.report.iterations);
    } else {
      comp.apply(raw.packed);
      s.q = 0.5 * (raw.q() + raw.x());
      s.p = 0.5 * (raw.p() + raw.y());
      record(k + 1, s, raw.defect_norm(), 0);
    }
  }
  run.final_state = s;
  return run;
}

}  // namespace shs
