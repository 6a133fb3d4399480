#include "pharec/ode.hpp"

#include <cmath>
#include <string>

#include "pharec/error.hpp"

namespace pharec {

namespace {

void check_step(double duration, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorCode::InvalidStep, "step must be positive, got " + std::to_string(step));
  }
  if (!(duration >= step * (1.0 - 1e-12)) || !std::isfinite(duration)) {
    throw Error(ErrorCode::InvalidStep, "duration must be at least one step");
  }
}

void check_finite(const Vec2& x, double t) {
  if (!x.allFinite()) {
    throw Error(ErrorCode::NonFiniteState, "state became non-finite at t=" + std::to_string(t));
  }
}

}  // namespace

long step_count(double duration, double step) {
  check_step(duration, step);
  const long n = static_cast<long>(std::ceil(duration / step - 1e-9));
  return n < 1 ? 1 : n;
}

Vec2 rk4_step(const PlanarField& vf, const Vec2& x, double h) {
  const Vec2 k1 = vf(x);
  const Vec2 k2 = vf(x + 0.5 * h * k1);
  const Vec2 k3 = vf(x + 0.5 * h * k2);
  const Vec2 k4 = vf(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory integrate(const PlanarField& vf, const Vec2& state0, double duration, double step,
                     Coords coords) {
  const long n = step_count(duration, step);
  const double h = duration / static_cast<double>(n);
  check_finite(vf(state0), 0.0);
  Trajectory traj;
  traj.coords = coords;
  traj.step = h;
  traj.times.resize(n + 1);
  traj.states.resize(n + 1);
  Vec2 x = state0;
  traj.times[0] = 0.0;
  traj.states[0] = x;
  for (long i = 1; i <= n; ++i) {
    x = rk4_step(vf, x, h);
    const double t = static_cast<double>(i) * h;
    check_finite(x, t);
    traj.times[i] = t;
    traj.states[i] = x;
  }
  return traj;
}

TangentTrajectory integrate_with_tangent(const PlanarField& vf, const PlanarJacobian& jacobian,
                                         const Vec2& state0, double duration, double step,
                                         Coords coords) {
  const long n = step_count(duration, step);
  const double h = duration / static_cast<double>(n);
  TangentTrajectory out;
  out.base.coords = coords;
  out.base.step = h;
  out.base.times.resize(n + 1);
  out.base.states.resize(n + 1);
  out.tangent.resize(n + 1);
  Vec2 x = state0;
  Mat2 m = Mat2::Identity();
  out.base.times[0] = 0.0;
  out.base.states[0] = x;
  out.tangent[0] = m;
  for (long i = 1; i <= n; ++i) {
    const Vec2 k1 = vf(x);
    const Mat2 l1 = jacobian(x) * m;
    const Vec2 x2 = x + 0.5 * h * k1;
    const Mat2 m2 = m + 0.5 * h * l1;
    const Vec2 k2 = vf(x2);
    const Mat2 l2 = jacobian(x2) * m2;
    const Vec2 x3 = x + 0.5 * h * k2;
    const Mat2 m3 = m + 0.5 * h * l2;
    const Vec2 k3 = vf(x3);
    const Mat2 l3 = jacobian(x3) * m3;
    const Vec2 x4 = x + h * k3;
    const Mat2 m4 = m + h * l3;
    const Vec2 k4 = vf(x4);
    const Mat2 l4 = jacobian(x4) * m4;
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    m += (h / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
    const double t = static_cast<double>(i) * h;
    check_finite(x, t);
    if (!m.allFinite()) {
      throw Error(ErrorCode::NonFiniteState, "tangent became non-finite at t=" + std::to_string(t));
    }
    out.base.times[i] = t;
    out.base.states[i] = x;
    out.tangent[i] = m;
  }
  return out;
}

std::vector<Eigen::VectorXd> integrate_system(const SystemField& f, const Eigen::VectorXd& state0,
                                              long steps, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidStep, "step must be positive");
  if (steps < 1) throw Error(ErrorCode::InvalidStep, "need at least one step");
  const Eigen::Index d = state0.size();
  std::vector<Eigen::VectorXd> out;
  out.reserve(steps + 1);
  out.push_back(state0);
  Eigen::VectorXd x = state0, k1(d), k2(d), k3(d), k4(d), tmp(d);
  for (long i = 1; i <= steps; ++i) {
    f(x, k1);
    tmp = x + 0.5 * step * k1;
    f(tmp, k2);
    tmp = x + 0.5 * step * k2;
    f(tmp, k3);
    tmp = x + step * k3;
    f(tmp, k4);
    x += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) {
      throw Error(ErrorCode::NonFiniteState,
                  "network state became non-finite at t=" + std::to_string(i * step));
    }
    out.push_back(x);
  }
  return out;
}

}  // namespace pharec
