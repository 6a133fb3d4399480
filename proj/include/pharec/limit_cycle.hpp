#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pharec/ode.hpp"

namespace pharec {

struct LimitCycle {
  double period = 0.0;
  double omega = 0.0;
  int n_g = 64;
  // Radial profile: g0, then (cos kθ, sin kθ) for k = 1..n_g.
  Eigen::VectorXd gamma_coeffs;
  double lambda = 0.0;
  Mat2 monodromy = Mat2::Identity();
  double r_section = 0.0;         // r where the cycle crosses θ = 0
  double profile_residual = 0.0;  // max |r - γ(θ)| over the fitted period
  double step = 0.0;              // integration step used for downstream runs

  double gamma(double theta) const;
  double gamma_derivative(double theta) const;
  double gamma_max() const;  // over a 720-point grid
  double gamma_min() const;
};

struct CycleOptions {
  double step = 1e-3;
  int n_g = 64;
  double return_tol = 1e-10;
  int max_periods = 500;
  int steps_per_period = 2000;
};

// Locates the attracting cycle of a polar field (θ, r) from `seed` using the
// section θ = 0 mod 2π crossed with increasing θ.
LimitCycle find_limit_cycle(const PlanarField& vf, const Vec2& seed,
                            const CycleOptions& options = {});

struct FloquetResult {
  double lambda = 0.0;
  Mat2 monodromy = Mat2::Identity();
  double trivial_multiplier = 1.0;
  double multiplier = 0.0;
};

// Central differences with step h for fields without an analytic Jacobian.
PlanarJacobian finite_difference_jacobian(const PlanarField& vf, double h = 1e-6);

// Integrates the variational system over one period from (0, r_section).
// An empty jacobian selects finite differences.
FloquetResult floquet_from_monodromy(const PlanarField& vf, const PlanarJacobian& jacobian,
                                     const LimitCycle& cycle);

// Runs find_limit_cycle and floquet_from_monodromy and fills lambda/monodromy.
LimitCycle analyze_cycle(const PlanarField& vf, const PlanarJacobian& jacobian, const Vec2& seed,
                         const CycleOptions& options = {});

struct K1Curve {
  std::vector<double> phi;  // 257 values, 0..2π inclusive
  std::vector<Vec2> k1;     // (θ, r) components
};

// K1(φ) = exp(-λTφ/2π) M_φ K1(0) with K1(0) the monodromy eigenvector of
// e^{λT}, normalized to unit radial component.
K1Curve k1_oracle(const PlanarField& vf, const PlanarJacobian& jacobian, const LimitCycle& cycle,
                  double lambda);

}  // namespace pharec
