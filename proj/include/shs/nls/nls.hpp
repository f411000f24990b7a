#pragma once

#include "shs/core/noise.hpp"
#include "shs/core/types.hpp"
#include "shs/project/projection.hpp"

#include <string>
#include <vector>

namespace shs {

/// Interior nodes of [x_left, x_right] with homogeneous Dirichlet ends,
/// difference operators and the truncated Q-Wiener basis
/// E_ik = sin(k pi x_i) / sqrt(5), sqrt(lambda_k) = k^-3.
struct NlsLattice {
  double x_left = -5.0;
  double x_right = 5.0;
  Eigen::Index n = 0;
  double h = 0.0;
  Vector x;
  Eigen::Index modes = 0;
  Matrix e;
  Vector lam_sqrt;

  /// (D+ u)_i = (u_{i+1} - u_i) / h with u_{n+1} = 0.
  Vector d_plus(const Vector& u) const;
  /// (D- u)_i = (u_i - u_{i-1}) / h with u_0 = 0.
  Vector d_minus(const Vector& u) const;
  /// D+ D- u written into out (out must not alias u).
  void laplacian(const Eigen::Ref<const Vector>& u, Eigen::Ref<Vector> out) const;
};

NlsLattice build_lattice(double x_left, double x_right, Eigen::Index n_interior, Eigen::Index modes = 10);
/// Lattice whose spacing is h; (x_right - x_left) / h must be an integer >= 2.
NlsLattice lattice_with_spacing(double x_left, double x_right, double h, Eigen::Index modes = 10);

/// E (sqrt(lambda) .* dbeta).
Vector noise_vector(const NlsLattice& lat, const Vector& dbeta);

struct NlsState {
  Vector q;
  Vector p;
};

/// (Q, X, P, Y) packed in that block order.
struct NlsExtendedState {
  Vector packed;

  static NlsExtendedState lift(const NlsState& s);
  Eigen::Index n() const { return packed.size() / 4; }
  auto q() const { return packed.segment(0, n()); }
  auto x() const { return packed.segment(n(), n()); }
  auto p() const { return packed.segment(2 * n(), n()); }
  auto y() const { return packed.segment(3 * n(), n()); }
  /// ||(Q - X, P - Y)||
  double defect_norm() const;
};

/// Subflow with Q, Y frozen:
///   P += -tau (A~Q + rho Q) + Q w,  X += tau (A~Y + rho Y) - Y w,
/// rho = Q^2 + Y^2, w = noise_vector(dbeta).
NlsExtendedState subflow_a(const NlsLattice& lat, const NlsExtendedState& s, double tau, const Vector& dbeta);
/// Subflow with P, X frozen:
///   Q += tau (A~P + rho P) - P w,  Y += -tau (A~X + rho X) + X w,
/// rho = P^2 + X^2.
NlsExtendedState subflow_b(const NlsLattice& lat, const NlsExtendedState& s, double tau, const Vector& dbeta);

enum class NlsRecipe { AB, BA, StrangAB, StrangBA };

NlsRecipe parse_nls_recipe(const std::string& name);
std::string to_string(NlsRecipe r);
/// Fine intervals per step the recipe needs (2 for the Strang orders).
std::size_t nls_substeps(NlsRecipe r);

/// Frozen-noise one-step map of a recipe acting in place on packed
/// (Q, X, P, Y). Holds scratch buffers; not shareable across threads.
class NlsComposer {
 public:
  NlsComposer(const NlsLattice& lat, NlsRecipe recipe);

  void load_step(const NoiseGrid& grid, std::size_t fine_per_step, std::size_t step);
  void apply(Vector& packed);

 private:
  struct StageData {
    bool is_a;
    double tau;
    Vector w;
  };
  void apply_a(Vector& packed, const StageData& st);
  void apply_b(Vector& packed, const StageData& st);

  const NlsLattice* lat_;
  NlsRecipe recipe_;
  std::vector<StageData> stages_;
  Vector rho_, lap1_, lap2_;
};

struct NlsStepResult {
  NlsState state;
  ProjectionReport report;
};

NlsStepResult nls_step(NlsComposer& composer, const NlsState& s, const ProjectionConfig& cfg);
NlsStepResult nls_step(const NlsLattice& lat, NlsRecipe recipe, const NlsState& s, const NoiseGrid& grid,
                       std::size_t step, const ProjectionConfig& cfg, std::size_t fine_per_step = 0);

/// sum_i (P_i^2 + Q_i^2), fixed index order.
double charge(const NlsState& s);

/// P = cos(2x) sech(x), Q = sin(2x) sech(x) at the interior nodes.
NlsState nls_initial(const NlsLattice& lat);

struct NlsRunOptions {
  bool project = true;
  /// Keep the (Q, P) field at every step.
  bool keep_fields = false;
};

struct NlsRun {
  std::vector<double> t;
  std::vector<double> charge;
  /// Copy separation after each step (after the correction when projected).
  std::vector<double> defect;
  std::vector<int> newton_iters;
  std::vector<NlsState> fields;
  NlsState final_state;
};

/// Runs every whole step of the grid; the grid must carry one channel per
/// noise mode and nls_substeps(recipe) fine intervals per step.
NlsRun nls_simulate(const NlsLattice& lat, NlsRecipe recipe, const NlsState& init, const NoiseGrid& grid,
                    const ProjectionConfig& cfg, const NlsRunOptions& options = {});

}  // namespace shs
