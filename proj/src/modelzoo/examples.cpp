#include "shs/modelzoo/examples.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace shs {

namespace {

/// Builds {H0, c H0} with the proportionality hint.
ModelDefinition scaled_pair(std::string label, Eigen::Index dim, ScalarField h, GradientField grad, double c) {
  ModelDefinition def;
  def.label = std::move(label);
  def.dim = dim;
  def.terms.push_back({h, grad});
  def.terms.push_back({[h, c](VecIn x, VecIn y) { return c * h(x, y); },
                       [grad, c](VecIn x, VecIn y, VecOut gx, VecOut gy) {
                         grad(x, y, gx, gy);
                         gx *= c;
                         gy *= c;
                       }});
  def.proportional_to_drift = {1.0, c};
  return def;
}

NamedFunctional term_value(const HamiltonianModel& model, std::size_t r, std::string name) {
  // Copy the model into the closure so the functional outlives the spec.
  return {std::move(name), [model, r](const PhaseState& z) { return model.value(r, z.x, z.y); }};
}

Vector scalar(double v) { return Vector::Constant(1, v); }

}  // namespace

const NamedFunctional& ExampleSpec::invariant(const std::string& n) const {
  for (const auto& f : invariants) {
    if (f.name == n) return f;
  }
  std::ostringstream os;
  os << "example " << name << " has no invariant '" << n << "' (known:";
  for (const auto& f : invariants) os << ' ' << f.name;
  os << ')';
  throw std::invalid_argument(os.str());
}

std::vector<std::string> ExampleSpec::invariant_names() const {
  std::vector<std::string> out;
  for (const auto& f : invariants) out.push_back(f.name);
  return out;
}

ExampleSpec make_example1(double c) {
  ScalarField h = [](VecIn x, VecIn y) { return 0.5 * (x[0] * x[0] + 1.0) * (y[0] * y[0] + 1.0); };
  GradientField g = [](VecIn x, VecIn y, VecOut gx, VecOut gy) {
    gx[0] = x[0] * (y[0] * y[0] + 1.0);
    gy[0] = (x[0] * x[0] + 1.0) * y[0];
  };
  ModelDefinition def = scaled_pair("ex1", 1, h, g, c);
  def.noise_hessian = [c](VecIn x, VecIn y, Matrix& xx, Matrix& yy, Matrix& yx) {
    xx.resize(1, 1);
    yy.resize(1, 1);
    yx.resize(1, 1);
    xx(0, 0) = c * (y[0] * y[0] + 1.0);
    yy(0, 0) = c * (x[0] * x[0] + 1.0);
    yx(0, 0) = c * 2.0 * x[0] * y[0];
  };
  ExampleSpec spec{"ex1", HamiltonianModel(std::move(def)), PhaseState(scalar(0.0), scalar(-3.0)), {}, {}, {}, {}, {}};
  spec.invariants.push_back(term_value(spec.model, 0, "H0"));
  spec.invariants.push_back(term_value(spec.model, 1, "H1"));
  spec.params = {{"c", c}};
  return spec;
}

ExampleSpec make_example2(double c, const LotkaVolterraParams& p) {
  for (double yi : p.y0) {
    if (!(yi > 0.0)) throw std::invalid_argument("make_example2: y0 must be componentwise positive");
  }
  if (p.v == 0.0 || p.b == 0.0) throw std::invalid_argument("make_example2: v and b must be non-zero");
  const double cas = -std::log(p.y0[0]) / p.v - p.b * std::log(p.y0[1]) + std::log(p.y0[2]);
  const double a = p.a, b = p.b, v = p.v, omega = p.omega, mu = p.mu;

  // The system is written as d(X, Y) = [0 -1; 1 0] grad H (dt + c o dW), the
  // reverse of the canonical orientation, so the canonical drift Hamiltonian
  // is -H.
  ScalarField h = [=](VecIn x, VecIn y) {
    return -(a * b * std::exp(v * (x[0] - cas + b * y[0])) + std::exp(-y[0]) - omega * y[0] - a * std::exp(x[0]) -
             mu * x[0]);
  };
  GradientField g = [=](VecIn x, VecIn y, VecOut gx, VecOut gy) {
    const double e = std::exp(v * (x[0] - cas + b * y[0]));
    gx[0] = -(a * b * v * e - a * std::exp(x[0]) - mu);
    gy[0] = -(a * b * v * b * e - std::exp(-y[0]) - omega);
  };

  CoordinateTransform tf;
  tf.forward = [=](const PhaseState& z) {
    Vector yv(3);
    yv << std::exp(v * (z.x[0] - cas + b * z.y[0])), std::exp(-z.y[0]), std::exp(z.x[0]);
    return yv;
  };
  tf.inverse = [](const Vector& yv) {
    if (yv.size() != 3 || !(yv[1] > 0.0) || !(yv[2] > 0.0)) {
      throw std::domain_error("example 2 inverse transform needs positive y2, y3");
    }
    return PhaseState(scalar(std::log(yv[2])), scalar(-std::log(yv[1])));
  };

  ExampleSpec spec{"ex2",
                   HamiltonianModel(scaled_pair("ex2", 1, h, g, c)),
                   PhaseState(scalar(std::log(p.y0[2])), scalar(-std::log(p.y0[1]))),
                   {},
                   tf,
                   {},
                   {},
                   {}};
  spec.invariants.push_back(term_value(spec.model, 0, "H0"));
  spec.invariants.push_back({"casimir", [=, fwd = tf.forward](const PhaseState& z) {
                               const Vector yv = fwd(z);
                               return -std::log(yv[0]) / v - b * std::log(yv[1]) + std::log(yv[2]);
                             }});
  spec.params = {{"c", c}, {"a", a}, {"b", b}, {"v", v}, {"omega", omega}, {"mu", mu}, {"casimir", cas}};
  return spec;
}

ExampleSpec make_example3(double c) {
  ScalarField h = [](VecIn x, VecIn y) {
    const double f = (2.0 * x[0] - 3.0 * y[0]) / 10.0;
    const double g = (x[1] * x[1] + 2.0 * y[1] * y[1]) / 4.0;
    return std::exp(f * std::sin(g));
  };
  GradientField grad = [](VecIn x, VecIn y, VecOut gx, VecOut gy) {
    const double f = (2.0 * x[0] - 3.0 * y[0]) / 10.0;
    const double g = (x[1] * x[1] + 2.0 * y[1] * y[1]) / 4.0;
    const double sg = std::sin(g), cg = std::cos(g);
    const double hv = std::exp(f * sg);
    gx[0] = hv * 0.2 * sg;
    gy[0] = hv * -0.3 * sg;
    gx[1] = hv * f * cg * 0.5 * x[1];
    gy[1] = hv * f * cg * y[1];
  };
  Vector x0(2), y0(2);
  x0 << -1.0, 2.0;
  y0 << 1.0, -1.0;
  ExampleSpec spec{"ex3", HamiltonianModel(scaled_pair("ex3", 2, h, grad, c)), PhaseState(x0, y0), {}, {}, {}, {},
                   {}};

  Vector ax(2), ay(2);
  ax << 0.2, 0.0;
  ay << -0.3, 0.0;
  spec.linear.emplace(ax, ay);
  Matrix k11 = Matrix::Zero(2, 2), k22 = Matrix::Zero(2, 2);
  k11(1, 1) = 0.5;
  k22(1, 1) = 1.0;
  spec.quadratic.emplace(k11, Matrix::Zero(2, 2), k22);

  spec.invariants.push_back(term_value(spec.model, 0, "H0"));
  spec.invariants.push_back({"linear", [inv = *spec.linear](const PhaseState& z) { return eval_linear(inv, z); }});
  spec.invariants.push_back(
      {"quadratic", [inv = *spec.quadratic](const PhaseState& z) { return eval_quadratic(inv, z); }});
  spec.params = {{"c", c}};
  return spec;
}

RigidBodyInertia rigid_body_inertia() {
  const double s = std::sqrt(2.0 / 1.51);
  return {std::sqrt(2.0) + s, std::sqrt(2.0) - 0.51 * s, 1.0};
}

ExampleSpec make_example4(double c, const std::array<double, 3>& y0) {
  const auto [i1, i2, i3] = rigid_body_inertia();
  const double c1 = 0.5 * (y0[0] * y0[0] + y0[1] * y0[1] + y0[2] * y0[2]);
  if (!(c1 > 0.0)) throw std::invalid_argument("make_example4: y0 must be non-zero");

  // Same reversed orientation as Example 2: the canonical drift Hamiltonian
  // is -H, with H equal to the kinetic energy K of the body.
  ScalarField h = [=](VecIn x, VecIn y) {
    const double cy = std::cos(y[0]), sy = std::sin(y[0]);
    const double w = 2.0 * c1 - x[0] * x[0];
    return -(w * (cy * cy / (2.0 * i1) + sy * sy / (2.0 * i3)) + x[0] * x[0] / (2.0 * i2));
  };
  GradientField g = [=](VecIn x, VecIn y, VecOut gx, VecOut gy) {
    const double cy = std::cos(y[0]), sy = std::sin(y[0]);
    const double w = 2.0 * c1 - x[0] * x[0];
    gx[0] = x[0] * (cy * cy / i1 + sy * sy / i3) - x[0] / i2;
    gy[0] = -w * sy * cy * (1.0 / i3 - 1.0 / i1);
  };

  CoordinateTransform tf;
  tf.forward = [=](const PhaseState& z) {
    const double x = z.x[0];
    double w = 2.0 * c1 - x * x;
    if (w < 0.0) {
      if (-w > 1e-14 * 2.0 * c1) {
        std::ostringstream os;
        os << "example 4 transform: X^2 = " << x * x << " exceeds 2*C1 = " << 2.0 * c1;
        throw std::domain_error(os.str());
      }
      w = 0.0;
    }
    const double r = std::sqrt(w);
    Vector yv(3);
    yv << r * std::cos(z.y[0]), x, r * std::sin(z.y[0]);
    return yv;
  };
  tf.inverse = [](const Vector& yv) {
    if (yv.size() != 3) throw std::invalid_argument("example 4 inverse transform needs a 3-vector");
    return PhaseState(scalar(yv[1]), scalar(std::atan2(yv[2], yv[0])));
  };

  ExampleSpec spec{"ex4",
                   HamiltonianModel(scaled_pair("ex4", 1, h, g, c)),
                   PhaseState(scalar(y0[1]), scalar(std::atan2(y0[2], y0[0]))),
                   {},
                   tf,
                   {},
                   {},
                   {}};
  spec.invariants.push_back(term_value(spec.model, 0, "H0"));
  spec.invariants.push_back({"casimir", [fwd = tf.forward](const PhaseState& z) { return 0.5 * fwd(z).squaredNorm(); }});
  spec.invariants.push_back({"kinetic", [=, fwd = tf.forward](const PhaseState& z) {
                               const Vector yv = fwd(z);
                               return 0.5 * (yv[0] * yv[0] / i1 + yv[1] * yv[1] / i2 + yv[2] * yv[2] / i3);
                             }});
  spec.params = {{"c", c}, {"I1", i1}, {"I2", i2}, {"I3", i3}, {"C1", c1}};
  return spec;
}

ExampleSpec make_example(const std::string& name, double c) {
  if (name == "ex1") return make_example1(c);
  if (name == "ex2") return make_example2(c);
  if (name == "ex3") return make_example3(c);
  if (name == "ex4") return make_example4(c);
  throw std::invalid_argument("unknown example '" + name + "' (expected ex1, ex2, ex3 or ex4)");
}

double default_noise_scale(const std::string& name) {
  if (name == "ex1") return 0.15;
  if (name == "ex2") return 0.5;
  if (name == "ex3") return 0.5;
  if (name == "ex4") return 1.0;
  throw std::invalid_argument("unknown example '" + name + "'");
}

std::vector<std::string> example_names() { return {"ex1", "ex2", "ex3", "ex4"}; }

}  // namespace shs
