#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace pharec {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

enum class Coords { Polar, Cartesian };

using PlanarField = std::function<Vec2(const Vec2&)>;
using PlanarJacobian = std::function<Mat2(const Vec2&)>;

// Vector field on the full network state (2 components per oscillator).
using SystemField = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& dx)>;

struct Trajectory {
  Coords coords = Coords::Polar;
  double step = 0.0;
  std::vector<double> times;
  std::vector<Vec2> states;
};

struct TangentTrajectory {
  Trajectory base;
  std::vector<Mat2> tangent;
};

// Number of uniform steps used for `duration`; the effective step is
// duration / steps and never exceeds the requested step.
long step_count(double duration, double step);

Vec2 rk4_step(const PlanarField& vf, const Vec2& x, double h);

// Fixed-step RK4 samples at t = 0, h, ..., duration.
Trajectory integrate(const PlanarField& vf, const Vec2& state0, double duration, double step,
                     Coords coords = Coords::Polar);

// Flow plus dM/dt = DF(x(t)) M with M(0) = I.
TangentTrajectory integrate_with_tangent(const PlanarField& vf, const PlanarJacobian& jacobian,
                                         const Vec2& state0, double duration, double step,
                                         Coords coords = Coords::Polar);

// Fixed-step RK4 for a network state; returns samples at t = 0, h, ..., n h.
std::vector<Eigen::VectorXd> integrate_system(const SystemField& f, const Eigen::VectorXd& state0,
                                              long steps, double step);

}  // namespace pharec
