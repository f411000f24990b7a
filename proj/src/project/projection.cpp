#include "shs/project/projection.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace shs {

namespace {

/// lambda -> packed A^T lambda added to v.
void add_at_lambda(Vector& v, const Vector& lambda) {
  const Eigen::Index n = lambda.size() / 2;
  v.segment(0, n) += lambda.head(n);
  v.segment(n, n) -= lambda.head(n);
  v.segment(2 * n, n) += lambda.tail(n);
  v.segment(3 * n, n) -= lambda.tail(n);
}

void apply_a(const Vector& v, Vector& out) {
  const Eigen::Index n = v.size() / 4;
  out.head(n) = v.segment(0, n) - v.segment(n, n);
  out.tail(n) = v.segment(2 * n, n) - v.segment(3 * n, n);
}

struct Attempt {
  bool converged = false;
  int evals = 0;
  double delta = 0.0;
  Vector lambda;
  Vector mapped;  // F(base + A^T lambda)
};

Attempt simplified_newton(const ExtendedMap& map, const Vector& base, const ProjectionConfig& cfg, double guard) {
  const Eigen::Index n2 = base.size() / 2;
  Attempt a;
  a.lambda = Vector::Zero(n2);
  Vector r(n2), step(n2);
  for (int k = 0; k < cfg.max_iter; ++k) {
    a.mapped = base;
    add_at_lambda(a.mapped, a.lambda);
    map(a.mapped);
    ++a.evals;
    apply_a(a.mapped, r);
    step.noalias() = -0.25 * (r + 2.0 * a.lambda);
    a.delta = step.norm();
    if (!std::isfinite(a.delta)) return a;
    if (a.delta < cfg.tol) {
      a.converged = true;
      return a;
    }
    a.lambda += step;
    if (a.lambda.norm() > guard) return a;
  }
  return a;
}

Attempt full_newton(const ExtendedMap& map, const Vector& base, const ProjectionConfig& cfg, double guard) {
  const Eigen::Index n2 = base.size() / 2;
  Attempt a;
  a.lambda = Vector::Zero(n2);
  Vector g(n2), gp(n2);
  Matrix jac(n2, n2);
  const auto residual = [&](const Vector& lam, Vector& res, Vector* mapped) {
    Vector w = base;
    add_at_lambda(w, lam);
    map(w);
    ++a.evals;
    apply_a(w, res);
    res += 2.0 * lam;
    if (mapped) *mapped = std::move(w);
  };
  for (int k = 0; k < cfg.max_iter; ++k) {
    residual(a.lambda, g, &a.mapped);
    if (!g.allFinite()) return a;
    for (Eigen::Index j = 0; j < n2; ++j) {
      Vector lp = a.lambda;
      lp[j] += 1e-7 * (1.0 + std::abs(lp[j]));
      const double h = lp[j] - a.lambda[j];
      residual(lp, gp, nullptr);
      jac.col(j) = (gp - g) / h;
    }
    const Vector step = -jac.partialPivLu().solve(g);
    a.delta = step.norm();
    if (!std::isfinite(a.delta)) return a;
    if (a.delta < cfg.tol) {
      // One more evaluation at the accepted multiplier keeps the output
      // consistent with the returned lambda.
      a.lambda += step;
      residual(a.lambda, g, &a.mapped);
      a.converged = true;
      return a;
    }
    a.lambda += step;
    if (a.lambda.norm() > guard) return a;
  }
  return a;
}

}  // namespace

void ProjectionConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("ProjectionConfig: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("ProjectionConfig: max_iter must be at least 1");
}

ProjectionReport solve_symmetric_projection(const ExtendedMap& map, const Vector& base, const ProjectionConfig& cfg,
                                            Vector& out) {
  cfg.validate();
  if (base.size() == 0 || base.size() % 4 != 0) {
    throw std::invalid_argument("solve_symmetric_projection: packed length must be a positive multiple of 4");
  }
  const Eigen::Index n = base.size() / 4;
  const double z_norm = std::sqrt(0.25 * base.squaredNorm());
  const double guard = 1e6 * (1.0 + z_norm);

  ProjectionReport report;
  Attempt a;
  try {
    a = simplified_newton(map, base, cfg, guard);
  } catch (const std::domain_error&) {
    a.converged = false;
  }
  int evals = a.evals;
  if (!a.converged && cfg.fallback_full_newton) {
    Attempt b;
    try {
      b = full_newton(map, base, cfg, guard);
    } catch (const std::domain_error&) {
      b.converged = false;
    }
    evals += b.evals;
    report.used_fallback = true;
    if (b.converged) a = std::move(b);
    else a.delta = std::isfinite(b.delta) ? b.delta : a.delta;
  }
  if (!a.converged) {
    std::ostringstream os;
    os << "symmetric projection did not converge after " << evals << " map evaluations (last step " << a.delta
       << ", tol " << cfg.tol << ")";
    throw NoConvergence(os.str(), evals, a.delta);
  }

  Vector sep(2 * n);
  apply_a(a.mapped, sep);
  report.defect_pre = sep.norm();
  out = std::move(a.mapped);
  add_at_lambda(out, a.lambda);
  apply_a(out, sep);
  report.residual = sep.norm();
  report.lambda = std::move(a.lambda);
  report.iterations = evals;
  report.final_delta = a.delta;
  return report;
}

ExtendedState lift(const PhaseState& z) {
  require_same_dim(z.x.size(), z.y.size(), "lift");
  return ExtendedState(z.x, z.x, z.y, z.y);
}

PhaseState restrict_state(const ExtendedState& s) {
  return PhaseState(0.5 * (s.x() + s.u()), 0.5 * (s.y() + s.v()));
}

ProjectedStep projection_step(Composer& composer, const PhaseState& z, const ProjectionConfig& cfg) {
  require_same_dim(composer.model().dim(), z.dim(), "projection_step");
  const ExtendedState base = lift(z);
  Vector out;
  ProjectedStep res;
  res.report = solve_symmetric_projection([&](Vector& v) { composer.apply(v); }, base.packed(), cfg, out);
  res.z = restrict_state(ExtendedState::from_packed(std::move(out)));
  return res;
}

ProjectedStep projection_step(const CompositionRecipe& recipe, const HamiltonianModel& model, const PhaseState& z,
                              const NoiseGrid& grid, std::size_t step, const ProjectionConfig& cfg,
                              std::size_t fine_per_step) {
  Composer comp(model, recipe);
  comp.load_step(grid, fine_per_step == 0 ? recipe.substeps() : fine_per_step, step);
  return projection_step(comp, z, cfg);
}

StepFailure::StepFailure(const NoConvergence& cause, std::size_t step)
    : NoConvergence(std::string(cause.what()) + " at step " + std::to_string(step), cause.iterations(),
                    cause.last_delta()),
      step_(step) {}

Trajectory simulate(const CompositionRecipe& recipe, const HamiltonianModel& model, const PhaseState& z0,
                    const NoiseGrid& grid, const std::vector<Tracker>& trackers, const ProjectionConfig& cfg,
                    const SimulateOptions& options) {
  require_same_dim(model.dim(), z0.dim(), "simulate");
  const std::size_t fps = options.fine_per_step == 0 ? recipe.substeps() : options.fine_per_step;
  const std::size_t available = step_count(grid, fps);
  const std::size_t steps = options.steps == 0 ? available : options.steps;
  if (steps > available) throw std::invalid_argument("simulate: grid does not span the requested steps");
  const double dt = static_cast<double>(fps) * grid.dt_fine();

  Composer comp(model, recipe);
  Trajectory tr;
  tr.series.assign(trackers.size(), {});
  const auto record = [&](std::size_t n, const PhaseState& z, double pre, double post) {
    tr.t.push_back(grid.t0() + static_cast<double>(n) * dt);
    for (std::size_t k = 0; k < trackers.size(); ++k) tr.series[k].push_back(trackers[k].eval(z));
    tr.defect_pre.push_back(pre);
    tr.defect_post.push_back(post);
    if (options.keep_states) tr.states.push_back(z);
  };

  PhaseState z = z0;
  record(0, z, 0.0, 0.0);
  ExtendedState raw = lift(z0);
  for (std::size_t n = 0; n < steps; ++n) {
    comp.load_step(grid, fps, n);
    if (options.project) {
      try {
        auto res = projection_step(comp, z, cfg);
        z = std::move(res.z);
        const double pre = res.report.defect_pre, post = res.report.residual;
        tr.reports.push_back(std::move(res.report));
        record(n + 1, z, pre, post);
      } catch (const NoConvergence& e) {
        throw StepFailure(e, n);
      }
    } else {
      comp.apply(raw);
      z = restrict_state(raw);
      const double sep = raw.defect_norm();
      record(n + 1, z, sep, sep);
    }
  }
  tr.final_state = z;
  return tr;
}

}  // namespace shs
