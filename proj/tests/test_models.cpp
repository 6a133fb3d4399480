#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pharec/error.hpp"
#include "pharec/models.hpp"

using namespace pharec;

namespace {

constexpr double kPi = std::numbers::pi;

ModelSpec uncoupled(ModelKind kind) {
  ModelSpec s = default_model(kind);
  for (auto& row : s.eps) {
    for (double& e : row) e = 0.0;
  }
  return s;
}

}  // namespace

TEST_CASE("model vector fields at documented states") {
  {
    ModelSpec s = uncoupled(ModelKind::RadialIsochronClock);
    s.osc[0].a = 1.0;
    const NetworkModel m(s);
    const auto d = m.eval_model_vf({Vec2(0.0, 1.0), Vec2(1.0, 1.3)});
    CHECK(std::abs(d[0][0] - 1.0) < 1e-15);
    CHECK(std::abs(d[0][1]) < 1e-15);
  }
  {
    ModelSpec s = uncoupled(ModelKind::Canonical);
    s.osc[0].alpha = 1.5;
    s.osc[0].a = 1.2;
    const NetworkModel m(s);
    const auto d = m.eval_model_vf({Vec2(0.0, 1.0), Vec2(0.0, 1.0)});
    CHECK(std::abs(d[0][0] - 2.8) < 1e-14);
    CHECK(std::abs(d[0][1]) < 1e-15);
  }
  {
    ModelSpec s = default_model(ModelKind::VanDerPol);
    s.osc[1].mu = 0.5;
    s.eps[1][0] = 0.1;
    const NetworkModel m(s);
    const auto d = m.eval_model_vf({Vec2(2.0, 0.0), Vec2(1.0, 0.0)});
    CHECK(std::abs(d[1][1] - (-0.8)) < 1e-14);
  }
}

TEST_CASE("polar models reject non-positive radii and unknown kinds") {
  const NetworkModel m(default_model(ModelKind::RadialIsochronClock));
  CHECK_THROWS_AS(m.eval_model_vf({Vec2(0.0, 0.0), Vec2(0.0, 1.0)}), Error);
  CHECK_THROWS_AS(model_kind_from_string("duffing"), Error);
  ModelSpec bad = default_model(ModelKind::Canonical);
  bad.osc[0].alpha = -1.0;
  CHECK_THROWS_AS(validate(bad), Error);
  ModelSpec self = default_model(ModelKind::Canonical);
  self.eps[0][0] = 0.2;
  CHECK_THROWS_AS(validate(self), Error);
}

TEST_CASE("analytic ground truth values") {
  ModelSpec s = default_model(ModelKind::RadialIsochronClock);
  s.osc[0].a = 1.0;
  const auto g = analytic_ground_truth(s, 0);
  CHECK(std::abs(g.inverse(0.4, std::sqrt(2.0)).sigma - 0.25) < 1e-15);
  CHECK(std::abs(analytic_ground_truth(s, 1).lambda - (-1.4)) < 1e-15);

  const ModelSpec c = default_model(ModelKind::Canonical);
  const auto gc = analytic_ground_truth(c, 0);
  CHECK(std::abs(gc.a - 1.2) < 1e-15);
  CHECK(std::abs(gc.inverse(0.0, std::exp(1.0)).phi - 1.2) < 1e-14);
  CHECK(std::abs(gc.inverse(1.0, 1.0).sigma) < 1e-15);
  CHECK(std::abs(gc.inverse(0.0, 1.0).phi) < 1e-15);

  try {
    analytic_ground_truth(default_model(ModelKind::VanDerPol), 0);
    FAIL("expected NoAnalyticForm");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoAnalyticForm);
  }
}

TEST_CASE("Wilson-Cowan equilibrium") {
  OscillatorParams zero;
  const Vec2 z = wc_equilibrium(zero);
  CHECK(std::abs(z[0] - 0.5) < 1e-12);
  CHECK(std::abs(z[1] - 0.5) < 1e-12);

  const ModelSpec s = default_model(ModelKind::WilsonCowan);
  const auto& p = s.osc[0];
  CHECK(p.rho_y == -6.75);
  const Vec2 e = wc_equilibrium(p);
  CHECK(std::abs(-e[0] + sigmoid(p.rho_x + p.a * e[0] - p.b * e[1])) < 1e-12);
  CHECK(std::abs(-e[1] + sigmoid(p.rho_y + p.c * e[0] - p.d * e[1])) < 1e-12);

  OscillatorParams sat;
  sat.rho_x = 50.0;
  CHECK(std::abs(wc_equilibrium(sat)[0] - 1.0) < 1e-12);
}

TEST_CASE("uncoupled oscillators ignore each other") {
  for (auto kind : {ModelKind::RadialIsochronClock, ModelKind::Canonical, ModelKind::VanDerPol, ModelKind::WilsonCowan}) {
    const NetworkModel m(uncoupled(kind));
    const Vec2 x0 = is_polar_native(kind) ? Vec2(0.3, 1.1) : m.to_native(0, Vec2(0.3, m.frame(0).cx > 0 ? 0.2 : 1.5));
    const Vec2 a1 = is_polar_native(kind) ? Vec2(1.0, 0.9) : m.to_native(1, Vec2(1.0, 0.2));
    const Vec2 a2 = is_polar_native(kind) ? Vec2(2.5, 1.3) : m.to_native(1, Vec2(2.5, 0.3));
    CHECK(m.eval_model_vf({x0, a1})[0] == m.eval_model_vf({x0, a2})[0]);
  }
}

TEST_CASE("analytic transforms solve the invariance equations") {
  for (auto kind : {ModelKind::RadialIsochronClock, ModelKind::Canonical}) {
    const NetworkModel m(default_model(kind));
    for (std::size_t i = 0; i < 2; ++i) {
      const auto g = analytic_ground_truth(m.spec(), i);
      const PlanarSystem sys = m.uncoupled_polar(i);
      const double omega = sys.f(Vec2(0.0, 1.0))[0];
      double worst_phi = 0.0, worst_sigma = 0.0, worst_comp = 0.0;
      for (int p = 0; p < 20; ++p) {
        for (int q = 0; q < 20; ++q) {
          const double th = 2.0 * kPi * p / 20.0, r = 0.8 + 0.45 * q / 19.0;
          const Vec2 f = sys.f(Vec2(th, r));
          const InverseValue v = g.inverse(th, r);
          worst_phi = std::max(worst_phi, std::abs(f[0] * v.phi_theta + f[1] * v.phi_r - omega));
          worst_sigma = std::max(worst_sigma, std::abs(f[0] * v.sigma_theta + f[1] * v.sigma_r - g.lambda * v.sigma));
          worst_comp = std::max({worst_comp, std::abs(g.k_r(v.phi, v.sigma) - r), std::abs(g.k_theta(v.phi, v.sigma) - th)});
        }
      }
      CHECK(worst_phi < 1e-10);
      CHECK(worst_sigma < 1e-10);
      CHECK(worst_comp < 1e-10);
    }
  }
}

TEST_CASE("observable frame round trip") {
  for (auto kind : {ModelKind::VanDerPol, ModelKind::WilsonCowan}) {
    const NetworkModel m(default_model(kind));
    const Vec2 obs(1.1, 0.25);
    const Vec2 back = m.to_observable(1, m.to_native(1, obs));
    CHECK(std::abs(back[0] - obs[0]) < 1e-12);
    CHECK(std::abs(back[1] - obs[1]) < 1e-12);
  }
}

TEST_CASE("exact reduced coupling agrees with the printed expansion near the cycle") {
  const ModelSpec s = default_model(ModelKind::RadialIsochronClock);
  const auto terms = printed_reduced_coupling(s, 1, 0);
  const double phi_i = 0.7, phi_j = 2.1, si = 1e-3, sj = -2e-3;
  double gp = 0.0, gs = 0.0;
  for (const auto& t : terms) {
    const double own = t.own == 0 ? 1.0 : t.own == 1 ? std::cos(phi_i) : std::sin(phi_i);
    const double in = t.input == 0 ? std::cos(phi_j) : std::sin(phi_j);
    const double v = t.coef * std::pow(si, t.n_i) * std::pow(sj, t.n_j) * own * in;
    (t.phase ? gp : gs) += v;
  }
  const Vec2 exact = exact_reduced_coupling(s, 1, 0, phi_i, si, phi_j, sj);
  // third-order truncation error
  CHECK(std::abs(exact[0] - gp) < 1e-7);
  CHECK(std::abs(exact[1] - gs) < 1e-7);
}
