#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pharec/error.hpp"
#include "pharec/transforms.hpp"

using namespace pharec;

namespace {

constexpr double kPi = std::numbers::pi;

struct Built {
  ModelSpec spec;
  AnalyticGroundTruth truth;
  PlanarSystem sys;
  LimitCycle cycle;
  TransformBuild build;
};

Built build_for(ModelKind kind, double a0) {
  ModelSpec spec = default_model(kind);
  spec.osc[0].a = a0;
  const NetworkModel m(spec);
  PlanarSystem sys = m.uncoupled_polar(0);
  LimitCycle cycle = analyze_cycle(sys.f, sys.jac, Vec2(0.0, 1.1));
  const Averager avg(sys.f, cycle, cycle.lambda);
  TransformBuild b = build_transforms(avg, default_transform_options(kind));
  return {spec, analytic_ground_truth(spec, 0), sys, cycle, std::move(b)};
}

const Built& clock_fit() {
  static const Built b = build_for(ModelKind::RadialIsochronClock, 1.0);
  return b;
}

const Built& canonical() {
  static const Built b = build_for(ModelKind::Canonical, 1.2);
  return b;
}

}  // namespace

TEST_CASE("wrap_pi range") {
  CHECK(std::abs(wrap_pi(3.0 * kPi) - kPi) < 1e-12);
  CHECK(std::abs(wrap_pi(-0.5) + 0.5) < 1e-15);
  CHECK(std::abs(wrap_pi(2.0 * kPi + 0.25) - 0.25) < 1e-12);
}

TEST_CASE("initial-condition grid layout") {
  const Built& b = clock_fit();
  const auto grid = ic_grid(b.cycle, {4, 3, 0.5, 1.5});
  REQUIRE(grid.size() == 12);
  CHECK(std::abs(grid[0][0]) < 1e-15);
  double lo = 1e9, hi = 0.0;
  for (const Vec2& p : grid) {
    lo = std::min(lo, p[1] / b.cycle.gamma(p[0]));
    hi = std::max(hi, p[1] / b.cycle.gamma(p[0]));
  }
  CHECK(std::abs(lo - 0.5) < 1e-12);
  CHECK(std::abs(hi - 1.5) < 1e-12);
}

TEST_CASE("clock inverse transform matches the closed form") {
  const Built& b = clock_fit();
  double worst_sigma = 0.0, worst_phi = 0.0;
  for (int p = 0; p < 21; ++p) {
    for (int q = 0; q < 21; ++q) {
      const double th = 2.0 * kPi * p / 21.0, r = 0.8 + 0.5 * q / 20.0;
      const InverseValue v = b.build.set.eval_inverse(th, r);
      worst_sigma = std::max(worst_sigma, std::abs(v.sigma - (r * r - 1.0) / (2.0 * r * r)));
      worst_phi = std::max(worst_phi, std::abs(wrap_pi(v.phi - th)));
    }
  }
  CHECK(worst_sigma < 5e-3);
  CHECK(worst_phi < 5e-3);
}

TEST_CASE("clock forward radius matches the closed form") {
  const Built& b = clock_fit();
  double worst = 0.0, worst_cycle = 0.0;
  for (int p = 0; p < 16; ++p) {
    const double phi = 2.0 * kPi * p / 16.0;
    for (int q = 0; q <= 10; ++q) {
      const double s = -0.2 + 0.4 * q / 10.0;
      worst = std::max(worst, std::abs(b.build.set.eval_forward(phi, s).r - 1.0 / std::sqrt(1.0 - 2.0 * s)));
    }
    const ForwardValue on = b.build.set.eval_forward(phi, 0.0);
    worst_cycle = std::max(worst_cycle, std::abs(on.r - b.cycle.gamma(on.theta)));
  }
  CHECK(worst < 1e-2);
  CHECK(worst_cycle < 1e-2);
}

TEST_CASE("canonical transforms follow the sheared isochrons") {
  const Built& b = canonical();
  double worst_phi = 0.0, worst_fwd = 0.0;
  for (int p = 0; p < 16; ++p) {
    const double th = 2.0 * kPi * p / 16.0;
    for (int q = 0; q <= 10; ++q) {
      const double r = 0.8 + 0.45 * q / 10.0;
      worst_phi = std::max(worst_phi, std::abs(wrap_pi(b.build.set.eval_inverse(th, r).phi - th - 1.2 * std::log(r))));
      const double s = -0.1 + 0.2 * q / 10.0;
      const double expect = b.truth.k_theta(th, s / b.truth.amplitude_scale) - th;
      worst_fwd = std::max(worst_fwd, std::abs(wrap_pi(b.build.set.eval_forward(th, s).theta - th - expect)));
    }
  }
  CHECK(worst_phi < 1e-2);
  CHECK(worst_fwd < 2e-2);
}

TEST_CASE("fitted transforms satisfy invariance and composition") {
  for (const Built* b : {&clock_fit(), &canonical()}) {
    const auto grid = interior_grid(b->build.set);
    CHECK(grid.size() == 225);
    for (const Vec2& p : grid) CHECK(b->build.set.in_domain(p[0], p[1]));
    const InvarianceResidual res = invariance_residual(b->build.set, b->sys.f, grid, b->cycle.omega, b->cycle.lambda);
    CHECK(res.phase_rms < 1e-2 * b->cycle.omega);
    CHECK(res.amplitude_rms < 1e-2 * std::abs(b->cycle.lambda) * res.sigma_max);
    CHECK(composition_error(b->build.set, grid) < 1e-2);
  }
}

TEST_CASE("inverse gradients match central differences") {
  const TransformSet& set = canonical().build.set;
  const double th = 1.3, r = 1.07, h = 1e-6;
  const InverseValue v = set.eval_inverse(th, r);
  CHECK(std::abs(v.sigma_r - (set.eval_inverse(th, r + h).sigma - set.eval_inverse(th, r - h).sigma) / (2 * h)) < 1e-6);
  CHECK(std::abs(v.phi_theta - (set.eval_inverse(th + h, r).phi - set.eval_inverse(th - h, r).phi) / (2 * h)) < 1e-6);
  const ForwardValue f = set.eval_forward(0.4, 0.05);
  CHECK(std::abs(f.r_sigma - (set.eval_forward(0.4, 0.05 + h).r - set.eval_forward(0.4, 0.05 - h).r) / (2 * h)) < 1e-6);
}

TEST_CASE("fits reject too few samples") {
  TransformSet set;
  std::vector<ReducedSample> few(5);
  CHECK_THROWS_AS(fit_inverse_transform(set, few, SingleBasisSpec{4, 5}, KappaPolicy::fixed(0.0)), Error);
}
