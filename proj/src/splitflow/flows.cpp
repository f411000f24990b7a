#include "shs/splitflow/flows.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace shs {

namespace {

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw std::domain_error(std::string(what) + ": non-finite state");
}

void check_increments(const HamiltonianModel& model, const StepIncrements& inc, const char* what) {
  if (inc.delta.size() != model.noise_channels() + 1) {
    std::ostringstream os;
    os << what << ": expected " << model.noise_channels() + 1 << " increments, got " << inc.delta.size();
    throw std::invalid_argument(os.str());
  }
}

int family(FlowId id) { return static_cast<int>(id); }

}  // namespace

std::string to_string(FlowId id) {
  switch (id) {
    case FlowId::F1: return "F1";
    case FlowId::F2: return "F2";
    case FlowId::F3: return "F3";
  }
  return "?";
}

void CompositionRecipe::validate(std::size_t noise_channels) const {
  if (stages.empty()) throw std::invalid_argument("CompositionRecipe: no stages");
  if (!gammas.empty() && gammas.size() != noise_channels + 1) {
    std::ostringstream os;
    os << "CompositionRecipe: " << gammas.size() << " gammas for " << noise_channels + 1 << " channels";
    throw std::invalid_argument(os.str());
  }
  std::map<int, std::pair<std::int64_t, std::int64_t>> sums;
  for (const auto& st : stages) {
    const auto& f = st.fraction;
    if (f.num <= 0 || f.den <= 0 || f.num > f.den) {
      throw std::invalid_argument("CompositionRecipe: stage fractions must lie in (0, 1]");
    }
    auto [it, fresh] = sums.try_emplace(family(st.flow), 0, 1);
    auto& [num, den] = it->second;
    num = num * f.den + static_cast<std::int64_t>(f.num) * den;
    den *= f.den;
    const std::int64_t g = std::gcd(num, den);
    num /= g;
    den /= g;
  }
  for (const auto& [fam, nd] : sums) {
    if (nd.first != nd.second) {
      throw std::invalid_argument("CompositionRecipe: fractions of " + to_string(static_cast<FlowId>(fam)) +
                                  " do not sum to 1");
    }
  }
}

std::size_t CompositionRecipe::substeps() const {
  std::size_t l = 1;
  for (const auto& st : stages) l = std::lcm(l, static_cast<std::size_t>(st.fraction.den));
  return l;
}

CompositionRecipe CompositionRecipe::lie(std::vector<double> gammas) {
  CompositionRecipe r;
  r.stages = {{FlowId::F1, {1, 1}}, {FlowId::F2, {1, 1}}, {FlowId::F3, {1, 1}}};
  r.gammas = std::move(gammas);
  return r;
}

CompositionRecipe CompositionRecipe::strang(std::vector<double> gammas) {
  CompositionRecipe r;
  r.stages = {{FlowId::F1, {1, 2}}, {FlowId::F2, {1, 2}}, {FlowId::F3, {1, 1}}, {FlowId::F2, {1, 2}},
              {FlowId::F1, {1, 2}}};
  r.gammas = std::move(gammas);
  return r;
}

namespace {

ExtendedState single_exchange(FlowId id, const HamiltonianModel& model, const ExtendedState& s,
                              const StepIncrements& inc) {
  require_same_dim(model.dim(), s.dim(), id == FlowId::F1 ? "flow_f1" : "flow_f2");
  CompositionRecipe recipe;
  recipe.stages = {{id, {1, 1}}};
  Composer comp(model, std::move(recipe));
  comp.load_stage_increments({inc});
  ExtendedState out = s;
  comp.apply(out);
  return out;
}

}  // namespace

ExtendedState flow_f1(const HamiltonianModel& model, const ExtendedState& s, const StepIncrements& inc) {
  return single_exchange(FlowId::F1, model, s, inc);
}

ExtendedState flow_f2(const HamiltonianModel& model, const ExtendedState& s, const StepIncrements& inc) {
  return single_exchange(FlowId::F2, model, s, inc);
}

ExtendedState flow_f3(const std::vector<double>& gammas, const ExtendedState& s, const StepIncrements& inc) {
  if (!gammas.empty() && gammas.size() != inc.delta.size()) {
    throw std::invalid_argument("flow_f3: gammas and increments differ in channel count");
  }
  double theta = 0.0;
  for (std::size_t r = 0; r < gammas.size(); ++r) theta += 4.0 * gammas[r] * inc.delta[r];
  if (theta == 0.0) return s;
  const double c = std::cos(theta), sn = std::sin(theta);
  ExtendedState out = s;
  const Vector sx = s.x() + s.u(), sy = s.y() + s.v();
  const Vector dx = s.x() - s.u(), dy = s.y() - s.v();
  const Vector dx2 = c * dx + sn * dy;
  const Vector dy2 = -sn * dx + c * dy;
  out.x() = 0.5 * (sx + dx2);
  out.u() = 0.5 * (sx - dx2);
  out.y() = 0.5 * (sy + dy2);
  out.v() = 0.5 * (sy - dy2);
  return out;
}

Composer::Composer(const HamiltonianModel& model, CompositionRecipe recipe)
    : model_(&model), recipe_(std::move(recipe)) {
  recipe_.validate(model.noise_channels());
  const Eigen::Index d = model.dim();
  gx_.resize(d);
  gy_.resize(d);
  sum_gx_.resize(d);
  sum_gy_.resize(d);

  // Windows of one family are laid consecutively from the start of the step.
  std::map<int, std::pair<std::int64_t, std::int64_t>> offset;
  for (const auto& st : recipe_.stages) {
    auto [it, fresh] = offset.try_emplace(family(st.flow), 0, 1);
    auto& [num, den] = it->second;
    windows_.push_back({{static_cast<int>(num), static_cast<int>(den)}, st.fraction});
    num = num * st.fraction.den + static_cast<std::int64_t>(st.fraction.num) * den;
    den *= st.fraction.den;
    const std::int64_t g = std::gcd(num, den);
    num /= g;
    den /= g;
  }
  stage_inc_.assign(recipe_.stages.size(), StepIncrements{std::vector<double>(model.noise_channels() + 1, 0.0)});
  cos_theta_.assign(stage_inc_.size(), 1.0);
  sin_theta_.assign(stage_inc_.size(), 0.0);
}

void Composer::load_step(const NoiseGrid& grid, std::size_t fine_per_step, std::size_t step) {
  if (grid.noise_channels() != model_->noise_channels()) {
    throw std::invalid_argument("Composer: grid channel count differs from model");
  }
  if (fine_per_step == 0 || fine_per_step % recipe_.substeps() != 0) {
    throw std::invalid_argument("Composer: step does not hold a whole number of recipe windows");
  }
  if (step >= step_count(grid, fine_per_step)) throw std::out_of_range("Composer: step beyond grid");
  const std::size_t base = step * fine_per_step;
  for (std::size_t i = 0; i < windows_.size(); ++i) {
    const auto& w = windows_[i];
    // substeps() divides fine_per_step, so both products are exact.
    const std::size_t begin = base + fine_per_step * static_cast<std::size_t>(w.start.num) /
                                         static_cast<std::size_t>(w.start.den);
    const std::size_t count = fine_per_step * static_cast<std::size_t>(w.length.num) /
                              static_cast<std::size_t>(w.length.den);
    auto& delta = stage_inc_[i].delta;
    delta[0] = static_cast<double>(count) * grid.dt_fine();
    for (std::size_t r = 1; r < delta.size(); ++r) delta[r] = grid.window_sum(r, begin, count);
  }
  update_rotations();
}

void Composer::load_stage_increments(std::vector<StepIncrements> per_stage) {
  if (per_stage.size() != recipe_.stages.size()) {
    throw std::invalid_argument("Composer: one increment set per stage required");
  }
  for (const auto& inc : per_stage) check_increments(*model_, inc, "Composer");
  stage_inc_ = std::move(per_stage);
  update_rotations();
}

void Composer::update_rotations() {
  for (std::size_t i = 0; i < stage_inc_.size(); ++i) {
    if (recipe_.stages[i].flow != FlowId::F3) continue;
    double theta = 0.0;
    for (std::size_t r = 0; r < stage_inc_[i].delta.size(); ++r) {
      theta += 4.0 * recipe_.gamma(r) * stage_inc_[i].delta[r];
    }
    cos_theta_[i] = std::cos(theta);
    sin_theta_[i] = std::sin(theta);
  }
}

void Composer::apply_exchange(Vector& packed, std::size_t stage, bool first) {
  const Eigen::Index d = model_->dim();
  // F1 reads (X, V) and moves (U, Y); F2 reads (U, Y) and moves (X, V).
  const Eigen::Index qa = first ? 0 : d;
  const Eigen::Index pa = first ? 3 * d : 2 * d;
  const Eigen::Index qb = first ? d : 0;
  const Eigen::Index pb = first ? 2 * d : 3 * d;
  const auto& delta = stage_inc_[stage].delta;
  const auto& prop = model_->proportionality();

  if (recipe_.fuse_proportional_channels && prop) {
    double w = 0.0;
    for (std::size_t r = 0; r < delta.size(); ++r) w += (*prop)[r] * delta[r];
    model_->gradient(0, packed.segment(qa, d), packed.segment(pa, d), gx_, gy_);
    packed.segment(qb, d) += w * gy_;
    packed.segment(pb, d) -= w * gx_;
    return;
  }
  if (delta.size() == 1) {
    model_->gradient(0, packed.segment(qa, d), packed.segment(pa, d), gx_, gy_);
    packed.segment(qb, d) += delta[0] * gy_;
    packed.segment(pb, d) -= delta[0] * gx_;
    return;
  }
  sum_gx_.setZero();
  sum_gy_.setZero();
  for (std::size_t r = 0; r < delta.size(); ++r) {
    model_->gradient(r, packed.segment(qa, d), packed.segment(pa, d), gx_, gy_);
    sum_gx_ += delta[r] * gx_;
    sum_gy_ += delta[r] * gy_;
  }
  packed.segment(qb, d) += sum_gy_;
  packed.segment(pb, d) -= sum_gx_;
}

void Composer::apply(Vector& packed) {
  if (stage_inc_.empty()) throw std::logic_error("Composer::apply: no increments loaded");
  const Eigen::Index d = model_->dim();
  require_same_dim(4 * d, packed.size(), "Composer::apply");
  for (std::size_t i = 0; i < recipe_.stages.size(); ++i) {
    switch (recipe_.stages[i].flow) {
      case FlowId::F1: apply_exchange(packed, i, true); break;
      case FlowId::F2: apply_exchange(packed, i, false); break;
      case FlowId::F3: {
        if (sin_theta_[i] == 0.0 && cos_theta_[i] == 1.0) break;
        const double c = cos_theta_[i], sn = sin_theta_[i];
        for (Eigen::Index k = 0; k < d; ++k) {
          const double x = packed[k], u = packed[d + k], y = packed[2 * d + k], v = packed[3 * d + k];
          const double sx = x + u, sy = y + v, dx = x - u, dy = y - v;
          const double dx2 = c * dx + sn * dy;
          const double dy2 = -sn * dx + c * dy;
          packed[k] = 0.5 * (sx + dx2);
          packed[d + k] = 0.5 * (sx - dx2);
          packed[2 * d + k] = 0.5 * (sy + dy2);
          packed[3 * d + k] = 0.5 * (sy - dy2);
        }
        break;
      }
    }
  }
  require_finite(packed, "Composer::apply");
}

ExtendedState compose(const CompositionRecipe& recipe, const HamiltonianModel& model, const ExtendedState& s,
                      const NoiseGrid& grid, std::size_t step, std::size_t fine_per_step) {
  Composer comp(model, recipe);
  comp.load_step(grid, fine_per_step == 0 ? recipe.substeps() : fine_per_step, step);
  ExtendedState out = s;
  comp.apply(out);
  return out;
}

double symplectic_residual(const PackedMap& map, const Vector& z, double fd_step) {
  if (!(fd_step > 0.0)) throw std::invalid_argument("symplectic_residual: fd_step must be positive");
  if (z.size() % 2 != 0) throw std::invalid_argument("symplectic_residual: odd state length");
  const Eigen::Index n = z.size();
  const Eigen::Index half = n / 2;
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Vector zp = z, zm = z;
    zp[j] += fd_step;
    zm[j] -= fd_step;
    const double denom = zp[j] - zm[j];
    const Vector fp = map(zp);
    const Vector fm = map(zm);
    require_same_dim(n, fp.size(), "symplectic_residual map output");
    m.col(j) = (fp - fm) / denom;
  }
  if (!m.allFinite()) throw std::domain_error("symplectic_residual: non-finite Jacobian");
  Matrix j = Matrix::Zero(n, n);
  j.topRightCorner(half, half).setIdentity();
  j.bottomLeftCorner(half, half) = -Matrix::Identity(half, half);
  return (m.transpose() * j * m - j).cwiseAbs().maxCoeff();
}

double symplectic_residual_extended(const std::function<ExtendedState(const ExtendedState&)>& map,
                                    const ExtendedState& s, double fd_step) {
  return symplectic_residual(
      [&](const Vector& p) { return map(ExtendedState::from_packed(p)).packed(); }, s.packed(), fd_step);
}

}  // namespace shs
