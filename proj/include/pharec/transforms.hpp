#pragma once

#include <vector>

#include "pharec/averaging.hpp"
#include "pharec/basis.hpp"
#include "pharec/models.hpp"
#include "pharec/ridge.hpp"

namespace pharec {

struct TransformDomain {
  double r_lo = 0.0, r_hi = 0.0;          // observable radii of the samples
  double scale_lo = 0.0, scale_hi = 0.0;  // r / γ(θ) of the samples
  double sigma_lo = 0.0, sigma_hi = 0.0;  // reduced amplitudes of the samples
};

struct ForwardValue {
  double theta = 0.0, theta_phi = 0.0, theta_sigma = 0.0;
  double r = 0.0, r_phi = 0.0, r_sigma = 0.0;
};

struct TransformSet {
  FittedSeries inverse_phase;      // Φ(θ, r) - θ
  FittedSeries inverse_amplitude;  // Σ(θ, r)
  FittedSeries forward_angle;      // K^θ(φ, σ) - φ
  FittedSeries forward_radius;     // K^r(φ, σ)
  TransformDomain domain;
  Eigen::VectorXd gamma_coeffs;  // cycle profile the scale bounds refer to
  int n_g = 0;
  double omega = 0.0;
  double lambda = 0.0;
  double kappa[4] = {0.0, 0.0, 0.0, 0.0};

  InverseValue eval_inverse(double theta, double r) const;
  ForwardValue eval_forward(double phi, double sigma) const;
  double gamma(double theta) const;
  // r / γ(θ) inside the sampled scale band and Σ inside the sampled σ band
  // widened by `sigma_margin` of its width.
  bool in_domain(double theta, double r, double sigma_margin = 0.1) const;
};

struct IcGridOptions {
  int n_theta = 21;
  int n_radius = 15;
  double scale_lo = 0.75;
  double scale_hi = 1.35;
};

// θ = 2π a / n_theta, r = f γ(θ) with f evenly spaced in [scale_lo, scale_hi].
std::vector<Vec2> ic_grid(const LimitCycle& cycle, const IcGridOptions& options = {});

std::vector<ReducedSample> reduce_samples(const Averager& averager, const std::vector<Vec2>& ics,
                                          int jobs);

// Wraps an angle to (-π, π].
double wrap_pi(double a);

void fit_inverse_transform(TransformSet& set, const std::vector<ReducedSample>& samples,
                           const SingleBasisSpec& spec, const KappaPolicy& policy = KappaPolicy::gcv());
void fit_forward_transform(TransformSet& set, const std::vector<ReducedSample>& samples,
                           const SingleBasisSpec& spec, const KappaPolicy& policy = KappaPolicy::gcv());

struct TransformOptions {
  IcGridOptions grid;
  SingleBasisSpec inverse_spec;
  SingleBasisSpec forward_spec;
  int jobs = 1;
};

// Grid and orders per model kind: polar models use the defaults, Cartesian
// models need a denser grid and more harmonics for their sheared isochrons.
TransformOptions default_transform_options(ModelKind kind);

struct TransformBuild {
  TransformSet set;
  std::vector<ReducedSample> samples;
};

// Reduced coordinates on the IC grid followed by both fits.
TransformBuild build_transforms(const Averager& averager, const TransformOptions& options);

// 15 x 15 grid of (θ, r) inside the sampled scale band shrunk by 5% of its
// width on each side.
std::vector<Vec2> interior_grid(const TransformSet& set, int n = 15);

struct InvarianceResidual {
  double phase_rms = 0.0;      // RMS |F·∇Φ - ω|
  double amplitude_rms = 0.0;  // RMS |F·∇Σ - λΣ|
  double sigma_max = 0.0;      // max |Σ| on the grid
};

InvarianceResidual invariance_residual(const TransformSet& set, const PlanarField& vf,
                                       const std::vector<Vec2>& grid, double omega, double lambda);

// Max over the grid of |K^θ(Φ, Σ) - θ| (wrapped) and |K^r(Φ, Σ) - r|.
double composition_error(const TransformSet& set, const std::vector<Vec2>& grid);

}  // namespace pharec
