#include "pharec/models.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "pharec/error.hpp"

namespace pharec {

namespace {

constexpr double kPi = std::numbers::pi;

Vec2 unit_u(double theta, double s) { return {std::cos(theta), s * std::sin(theta)}; }
Vec2 unit_v(double theta, double s) { return {-std::sin(theta), s * std::cos(theta)}; }

// Settles the uncoupled Cartesian oscillator and measures the time-averaged
// centre and rotation sense over one period.
ObservableFrame settle_frame(const NetworkModel& model, std::size_t i, const Vec2& seed) {
  const PlanarField f = [&model, i](const Vec2& x) { return model.uncoupled_native(i, x); };
  const double h = 1e-3;
  Vec2 x = seed;
  for (int k = 0; k < 300000; ++k) x = rk4_step(f, x, h);
  const Trajectory tr = integrate(f, x, 40.0, h, Coords::Cartesian);
  double xmin = tr.states[0][0], xmax = xmin;
  for (const auto& s : tr.states) {
    xmin = std::min(xmin, s[0]);
    xmax = std::max(xmax, s[0]);
  }
  const double mid = 0.5 * (xmin + xmax);
  std::vector<double> crossings;
  std::vector<std::size_t> idx;
  for (std::size_t k = 1; k < tr.states.size(); ++k) {
    const double a = tr.states[k - 1][0] - mid, b = tr.states[k][0] - mid;
    if (a < 0.0 && b >= 0.0) {
      crossings.push_back(tr.times[k - 1] + h * a / (a - b));
      idx.push_back(k);
    }
  }
  if (crossings.size() < 2) throw Error(ErrorCode::NoConvergence, "no oscillation found for frame");
  const std::size_t k0 = idx[idx.size() - 2], k1 = idx.back();
  Vec2 sum = Vec2::Zero();
  for (std::size_t k = k0; k < k1; ++k) sum += 0.5 * h * (tr.states[k] + tr.states[k + 1]);
  const double span = tr.times[k1] - tr.times[k0];
  const Vec2 centre = sum / span;
  double area = 0.0;
  for (std::size_t k = k0; k < k1; ++k) {
    const Vec2 p = tr.states[k] - centre, q = tr.states[k + 1] - centre;
    area += p[0] * q[1] - p[1] * q[0];
  }
  return {centre[0], centre[1], area >= 0.0 ? 1.0 : -1.0};
}

double wc_residual_norm(const OscillatorParams& p, const Vec2& z) {
  const double fx = -z[0] + sigmoid(p.rho_x + p.a * z[0] - p.b * z[1]);
  const double fy = -z[1] + sigmoid(p.rho_y + p.c * z[0] - p.d * z[1]);
  return std::hypot(fx, fy);
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::RadialIsochronClock: return "radial_isochron_clock";
    case ModelKind::Canonical: return "canonical";
    case ModelKind::VanDerPol: return "van_der_pol";
    case ModelKind::WilsonCowan: return "wilson_cowan";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "radial_isochron_clock") return ModelKind::RadialIsochronClock;
  if (name == "canonical") return ModelKind::Canonical;
  if (name == "van_der_pol") return ModelKind::VanDerPol;
  if (name == "wilson_cowan") return ModelKind::WilsonCowan;
  throw Error(ErrorCode::UnknownKind, "unknown model kind '" + name + "'");
}

ModelSpec default_model(ModelKind kind) {
  ModelSpec spec;
  spec.kind = kind;
  spec.osc.resize(2);
  spec.eps = {{0.0, 0.0}, {0.0, 0.0}};
  switch (kind) {
    case ModelKind::RadialIsochronClock:
      spec.osc[0].a = 1.0;
      spec.osc[1].a = 0.7;
      spec.eps[1][0] = 0.3;
      break;
    case ModelKind::Canonical:
      spec.osc[0].a = 1.2;
      spec.osc[0].alpha = 1.5;
      spec.osc[1].a = 1.0;
      spec.osc[1].alpha = 2.0;
      spec.eps[1][0] = 0.3;
      break;
    case ModelKind::VanDerPol:
      spec.osc[0].mu = 0.3;
      spec.osc[1].mu = 0.5;
      spec.eps[1][0] = 0.1;
      break;
    case ModelKind::WilsonCowan:
      for (auto& p : spec.osc) {
        p.a = p.b = p.c = 10.0;
        p.d = -2.0;
        p.rho_x = 0.0;
      }
      spec.osc[0].rho_y = -6.75;
      spec.osc[1].rho_y = -7.0;
      spec.eps[1][0] = 1.0;
      break;
  }
  return spec;
}

void validate(const ModelSpec& spec) {
  const std::size_t n = spec.osc.size();
  if (n == 0) throw Error(ErrorCode::InvalidConfig, "model needs at least one oscillator");
  if (spec.eps.size() != n) throw Error(ErrorCode::InvalidConfig, "coupling matrix row count");
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.eps[i].size() != n) throw Error(ErrorCode::InvalidConfig, "coupling matrix column count");
    if (spec.eps[i][i] != 0.0) throw Error(ErrorCode::InvalidConfig, "self-coupling must be zero");
    const auto& p = spec.osc[i];
    if (spec.kind == ModelKind::RadialIsochronClock && !(p.a > 0.0)) {
      throw Error(ErrorCode::InvalidConfig, "radial isochron clock needs a > 0");
    }
    if (spec.kind == ModelKind::Canonical && !(p.alpha > 0.0)) {
      throw Error(ErrorCode::InvalidConfig, "canonical model needs alpha > 0");
    }
  }
}

bool is_polar_native(ModelKind kind) {
  return kind == ModelKind::RadialIsochronClock || kind == ModelKind::Canonical;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Vec2 wc_equilibrium(const OscillatorParams& p) {
  Vec2 z(0.5, 0.5);
  for (int it = 0; it < 200; ++it) {
    const double su = sigmoid(p.rho_x + p.a * z[0] - p.b * z[1]);
    const double sv = sigmoid(p.rho_y + p.c * z[0] - p.d * z[1]);
    const Vec2 f(-z[0] + su, -z[1] + sv);
    const double res = f.norm();
    if (res < 1e-12) return z;
    const double du = su * (1.0 - su), dv = sv * (1.0 - sv);
    Mat2 j;
    j << -1.0 + p.a * du, -p.b * du, p.c * dv, -1.0 - p.d * dv;
    const Vec2 step = j.fullPivLu().solve(-f);
    double t = 1.0;
    Vec2 trial = z + step;
    while (t > 1e-6 && !(wc_residual_norm(p, trial) < res)) {
      t *= 0.5;
      trial = z + t * step;
    }
    z = trial;
  }
  if (wc_residual_norm(p, z) < 1e-12) return z;
  throw Error(ErrorCode::NoConvergence, "Wilson-Cowan equilibrium: Newton did not converge in 200 iterations");
}

NetworkModel::NetworkModel(ModelSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  const std::size_t n = spec_.size();
  frames_.assign(n, ObservableFrame{});
  equilibria_.assign(n, Vec2::Zero());
  if (spec_.kind == ModelKind::WilsonCowan) {
    for (std::size_t i = 0; i < n; ++i) equilibria_[i] = pharec::wc_equilibrium(spec_.osc[i]);
  }
  if (!is_polar_native(spec_.kind)) {
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 seed = spec_.kind == ModelKind::VanDerPol ? Vec2(2.0, 0.0)
                                                           : Vec2(equilibria_[i] + Vec2(0.05, 0.0));
      frames_[i] = settle_frame(*this, i, seed);
    }
  }
}

Vec2 NetworkModel::uncoupled_native(std::size_t i, const Vec2& x) const {
  const auto& p = spec_.osc[i];
  switch (spec_.kind) {
    case ModelKind::RadialIsochronClock:
      if (!(x[1] > 0.0)) throw Error(ErrorCode::NonPositiveRadius, "radius must be positive");
      return {1.0, p.a * x[1] * (1.0 - x[1] * x[1])};
    case ModelKind::Canonical:
      if (!(x[1] > 0.0)) throw Error(ErrorCode::NonPositiveRadius, "radius must be positive");
      return {1.0 + p.alpha * p.a * x[1] * x[1], p.alpha * x[1] * (1.0 - x[1] * x[1])};
    case ModelKind::VanDerPol:
      return {x[1], p.mu * (1.0 - x[0] * x[0]) * x[1] - x[0]};
    case ModelKind::WilsonCowan:
      return {-x[0] + sigmoid(p.rho_x + p.a * x[0] - p.b * x[1]),
              -x[1] + sigmoid(p.rho_y + p.c * x[0] - p.d * x[1])};
  }
  throw Error(ErrorCode::UnknownKind, "unknown model kind");
}

Mat2 NetworkModel::uncoupled_native_jacobian(std::size_t i, const Vec2& x) const {
  const auto& p = spec_.osc[i];
  Mat2 j;
  switch (spec_.kind) {
    case ModelKind::RadialIsochronClock:
      j << 0.0, 0.0, 0.0, p.a * (1.0 - 3.0 * x[1] * x[1]);
      return j;
    case ModelKind::Canonical:
      j << 0.0, 2.0 * p.alpha * p.a * x[1], 0.0, p.alpha * (1.0 - 3.0 * x[1] * x[1]);
      return j;
    case ModelKind::VanDerPol:
      j << 0.0, 1.0, -2.0 * p.mu * x[0] * x[1] - 1.0, p.mu * (1.0 - x[0] * x[0]);
      return j;
    case ModelKind::WilsonCowan: {
      const double su = sigmoid(p.rho_x + p.a * x[0] - p.b * x[1]);
      const double sv = sigmoid(p.rho_y + p.c * x[0] - p.d * x[1]);
      const double du = su * (1.0 - su), dv = sv * (1.0 - sv);
      j << -1.0 + p.a * du, -p.b * du, p.c * dv, -1.0 - p.d * dv;
      return j;
    }
  }
  throw Error(ErrorCode::UnknownKind, "unknown model kind");
}

Vec2 NetworkModel::coupling_native(std::size_t i, std::size_t j, const Vec2& xi,
                                   const Vec2& xj) const {
  const double e = spec_.eps[i][j];
  if (e == 0.0) return Vec2::Zero();
  switch (spec_.kind) {
    case ModelKind::RadialIsochronClock:
      if (!(xi[1] > 0.0)) throw Error(ErrorCode::NonPositiveRadius, "radius must be positive");
      return {e * xj[1] / xi[1] * std::cos(xi[0]) * std::sin(xj[0]),
              e * std::sin(xi[0]) * xj[1] * std::sin(xj[0])};
    case ModelKind::Canonical:
      if (!(xi[1] > 0.0)) throw Error(ErrorCode::NonPositiveRadius, "radius must be positive");
      return {-e * xj[1] / xi[1] * std::sin(xi[0]) * std::cos(xj[0]),
              e * xj[1] * std::cos(xi[0]) * std::cos(xj[0])};
    case ModelKind::VanDerPol:
      return {0.0, e * xj[0]};
    case ModelKind::WilsonCowan: {
      const auto& p = spec_.osc[i];
      const double base = p.rho_y + p.c * xi[0] - p.d * xi[1];
      const double input = e * (xj[0] - equilibria_[j][0]);
      return {0.0, sigmoid(base + input) - sigmoid(base)};
    }
  }
  throw Error(ErrorCode::UnknownKind, "unknown model kind");
}

std::vector<Vec2> NetworkModel::eval_model_vf(const std::vector<Vec2>& x) const {
  const std::size_t n = size();
  if (x.size() != n) throw Error(ErrorCode::ShapeMismatch, "state count must match oscillator count");
  std::vector<Vec2> dx(n);
  for (std::size_t i = 0; i < n; ++i) {
    dx[i] = uncoupled_native(i, x[i]);
    if (spec_.kind == ModelKind::WilsonCowan) {
      // The summed input enters the sigmoid once.
      const auto& p = spec_.osc[i];
      double input = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) input += spec_.eps[i][j] * (x[j][0] - equilibria_[j][0]);
      }
      dx[i][1] = -x[i][1] + sigmoid(p.rho_y + p.c * x[i][0] - p.d * x[i][1] + input);
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) dx[i] += coupling_native(i, j, x[i], x[j]);
    }
  }
  return dx;
}

void NetworkModel::eval_flat(const Eigen::VectorXd& x, Eigen::VectorXd& dx) const {
  const std::size_t n = size();
  std::vector<Vec2> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = Vec2(x[2 * i], x[2 * i + 1]);
  const std::vector<Vec2> d = eval_model_vf(s);
  dx.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    dx[2 * i] = d[i][0];
    dx[2 * i + 1] = d[i][1];
  }
}

Vec2 NetworkModel::to_observable(std::size_t i, const Vec2& native) const {
  if (is_polar_native(spec_.kind)) return native;
  const auto& fr = frames_[i];
  const double dx = native[0] - fr.cx, dy = native[1] - fr.cy;
  return {std::atan2(fr.orientation * dy, dx), std::hypot(dx, dy)};
}

Vec2 NetworkModel::to_native(std::size_t i, const Vec2& obs) const {
  if (is_polar_native(spec_.kind)) return obs;
  const auto& fr = frames_[i];
  return {fr.cx + obs[1] * std::cos(obs[0]), fr.cy + fr.orientation * obs[1] * std::sin(obs[0])};
}

PlanarSystem NetworkModel::uncoupled_polar(std::size_t i) const {
  // The closures own a copy of the model and stay valid after it is destroyed.
  const auto self = std::make_shared<const NetworkModel>(*this);
  PlanarSystem sys;
  if (is_polar_native(spec_.kind)) {
    sys.f = [self, i](const Vec2& x) { return self->uncoupled_native(i, x); };
    sys.jac = [self, i](const Vec2& x) { return self->uncoupled_native_jacobian(i, x); };
    return sys;
  }
  sys.f = [self, i](const Vec2& p) {
    const double s = self->frame(i).orientation;
    const Vec2 u = unit_u(p[0], s), v = unit_v(p[0], s);
    const Vec2 fx = self->uncoupled_native(i, self->to_native(i, p));
    return Vec2(v.dot(fx) / p[1], u.dot(fx));
  };
  sys.jac = [self, i](const Vec2& p) {
    const double s = self->frame(i).orientation;
    const double r = p[1];
    const Vec2 u = unit_u(p[0], s), v = unit_v(p[0], s);
    const Vec2 x = self->to_native(i, p);
    const Vec2 fx = self->uncoupled_native(i, x);
    const Mat2 df = self->uncoupled_native_jacobian(i, x);
    Mat2 j;
    j(0, 0) = -u.dot(fx) / r + v.dot(df * v);
    j(0, 1) = -v.dot(fx) / (r * r) + v.dot(df * u) / r;
    j(1, 0) = v.dot(fx) + r * u.dot(df * v);
    j(1, 1) = u.dot(df * u);
    return j;
  };
  return sys;
}

Vec2 NetworkModel::coupling_polar(std::size_t i, std::size_t j, const Vec2& obs_i,
                                  const Vec2& obs_j) const {
  if (is_polar_native(spec_.kind)) return coupling_native(i, j, obs_i, obs_j);
  const Vec2 g = coupling_native(i, j, to_native(i, obs_i), to_native(j, obs_j));
  const double s = frames_[i].orientation;
  const Vec2 u = unit_u(obs_i[0], s), v = unit_v(obs_i[0], s);
  return {v.dot(g) / obs_i[1], u.dot(g)};
}

InverseValue AnalyticGroundTruth::inverse(double theta, double r) const {
  if (!(r > 0.0)) throw Error(ErrorCode::NonPositiveRadius, "radius must be positive");
  InverseValue v;
  const double decay = kind == ModelKind::RadialIsochronClock ? a : alpha;
  v.sigma = (1.0 - 1.0 / (r * r)) / (2.0 * decay);
  v.sigma_r = 1.0 / (decay * r * r * r);
  v.phi_theta = 1.0;
  if (kind == ModelKind::RadialIsochronClock) {
    v.phi = theta;
  } else {
    v.phi = theta + a * std::log(r);
    v.phi_r = a / r;
  }
  return v;
}

double AnalyticGroundTruth::k_theta(double phi, double sigma) const {
  if (kind == ModelKind::RadialIsochronClock) return phi;
  return phi + 0.5 * a * std::log(1.0 - 2.0 * alpha * sigma);
}

double AnalyticGroundTruth::k_r(double, double sigma) const {
  const double decay = kind == ModelKind::RadialIsochronClock ? a : alpha;
  return 1.0 / std::sqrt(1.0 - 2.0 * decay * sigma);
}

AnalyticGroundTruth analytic_ground_truth(const ModelSpec& spec, std::size_t i) {
  if (!is_polar_native(spec.kind)) {
    throw Error(ErrorCode::NoAnalyticForm, "no closed-form transformations for " + to_string(spec.kind));
  }
  if (i >= spec.size()) throw Error(ErrorCode::ShapeMismatch, "oscillator index out of range");
  const auto& p = spec.osc[i];
  AnalyticGroundTruth g;
  g.kind = spec.kind;
  g.a = p.a;
  g.alpha = p.alpha;
  if (spec.kind == ModelKind::RadialIsochronClock) {
    g.lambda = -2.0 * p.a;
    g.omega = 1.0;
    g.amplitude_scale = p.a;
  } else {
    g.lambda = -2.0 * p.alpha;
    g.omega = 1.0 + p.alpha * p.a;
    g.amplitude_scale = p.alpha;
  }
  return g;
}

Vec2 exact_reduced_coupling(const ModelSpec& spec, std::size_t i, std::size_t j, double phi_i,
                            double sigma_i, double phi_j, double sigma_j) {
  const AnalyticGroundTruth gi = analytic_ground_truth(spec, i);
  const AnalyticGroundTruth gj = analytic_ground_truth(spec, j);
  const double e = spec.eps[i][j];
  const double si = gi.amplitude_scale, sj = gj.amplitude_scale;
  const double pi = 1.0 - 2.0 * si * sigma_i, pj = 1.0 - 2.0 * sj * sigma_j;
  const double ratio = std::sqrt(pi / pj);  // r_j / r_i
  const double amp = std::pow(pi, 1.5) / std::sqrt(pj) / si;
  if (spec.kind == ModelKind::RadialIsochronClock) {
    return {e * ratio * std::cos(phi_i) * std::sin(phi_j),
            e * amp * std::sin(phi_i) * std::sin(phi_j)};
  }
  const double ti = gi.k_theta(phi_i, sigma_i), tj = gj.k_theta(phi_j, sigma_j);
  return {e * ratio * (gi.a * std::cos(ti) - std::sin(ti)) * std::cos(tj),
          e * amp * std::cos(ti) * std::cos(tj)};
}

std::vector<PrintedTerm> printed_reduced_coupling(const ModelSpec& spec, std::size_t i,
                                                  std::size_t j) {
  if (!is_polar_native(spec.kind)) {
    throw Error(ErrorCode::NoAnalyticForm, "no printed coupling series for " + to_string(spec.kind));
  }
  const double e = spec.eps[i][j];
  std::vector<PrintedTerm> t;
  auto add = [&t](bool phase, int ni, int nj, int own, int input, double coef) {
    t.push_back({phase, ni, nj, own, input, coef});
  };
  // Factor codes.
  constexpr int C_I = 1, S_I = 2, C_J = 0, S_J = 1;
  if (spec.kind == ModelKind::RadialIsochronClock) {
    const double ai = spec.osc[i].a, aj = spec.osc[j].a;
    add(true, 0, 0, C_I, S_J, e);
    add(true, 1, 0, C_I, S_J, -e * ai);
    add(true, 0, 1, C_I, S_J, e * aj);
    add(true, 2, 0, C_I, S_J, -0.5 * e * ai * ai);
    add(true, 1, 1, C_I, S_J, -e * ai * aj);
    add(true, 0, 2, C_I, S_J, 1.5 * e * aj * aj);
    const double f = e / ai;
    add(false, 0, 0, S_I, S_J, f);
    add(false, 1, 0, S_I, S_J, -3.0 * f * ai);
    add(false, 0, 1, S_I, S_J, f * aj);
    add(false, 2, 0, S_I, S_J, 1.5 * f * ai * ai);
    add(false, 1, 1, S_I, S_J, -3.0 * f * ai * aj);
    add(false, 0, 2, S_I, S_J, 1.5 * f * aj * aj);
    return t;
  }
  const double ai = spec.osc[i].a, aj = spec.osc[j].a;
  const double li = spec.osc[i].alpha, lj = spec.osc[j].alpha;
  // Amplitude equation.
  add(false, 0, 0, C_I, C_J, e / li);
  add(false, 1, 0, S_I, C_J, e * ai);
  add(false, 1, 0, C_I, C_J, -3.0 * e);
  add(false, 0, 1, C_I, S_J, e * aj * lj / li);
  add(false, 0, 1, C_I, C_J, e * lj / li);
  add(false, 2, 0, C_I, C_J, -e * (ai * ai - 3.0) * li / 2.0);
  add(false, 2, 0, S_I, C_J, -2.0 * e * ai * li);
  add(false, 1, 1, S_I, S_J, e * ai * aj * lj);
  add(false, 1, 1, S_I, C_J, e * ai * lj);
  add(false, 1, 1, C_I, S_J, -3.0 * e * aj * lj);
  add(false, 1, 1, C_I, C_J, -3.0 * e * lj);
  add(false, 0, 2, C_I, C_J, -e * (aj * aj - 3.0) * lj * lj / (2.0 * li));
  add(false, 0, 2, C_I, S_J, 2.0 * e * aj * lj * lj / li);
  // Phase equation.
  add(true, 0, 0, S_I, C_J, -e);
  add(true, 0, 0, C_I, C_J, e * ai);
  add(true, 1, 0, S_I, C_J, e * (ai * ai + 1.0) * li);
  add(true, 0, 1, C_I, S_J, e * ai * aj * lj);
  add(true, 0, 1, C_I, C_J, e * ai * lj);
  add(true, 0, 1, S_I, S_J, -e * aj * lj);
  add(true, 0, 1, S_I, C_J, -e * lj);
  add(true, 2, 0, C_I, C_J, -e * (ai * ai * ai + ai) * li * li / 2.0);
  add(true, 2, 0, S_I, C_J, e * (ai * ai + 1.0) * li * li / 2.0);
  add(true, 1, 1, S_I, S_J, e * (ai * ai * aj + aj) * li * lj);
  add(true, 1, 1, S_I, C_J, e * (ai * ai + 1.0) * li * lj);
  add(true, 0, 2, C_I, C_J, -e * (aj * aj - 3.0) * ai * lj * lj / 2.0);
  add(true, 0, 2, S_I, C_J, -e * (3.0 - aj * aj) * lj * lj / 2.0);
  add(true, 0, 2, C_I, S_J, 2.0 * e * ai * aj * lj * lj);
  add(true, 0, 2, S_I, S_J, -2.0 * e * aj * lj * lj);
  return t;
}

std::vector<PrintedTerm> scale_printed_terms(std::vector<PrintedTerm> terms, double s_i,
                                             double s_j) {
  for (auto& t : terms) {
    t.coef *= (t.phase ? 1.0 : s_i) / (std::pow(s_i, t.n_i) * std::pow(s_j, t.n_j));
  }
  return terms;
}

}  // namespace pharec
