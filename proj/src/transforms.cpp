#include "pharec/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pharec/error.hpp"
#include "pharec/parallel.hpp"

namespace pharec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

// 1 - (largest circular gap between sampled angles) / 2π.
double angular_coverage(std::vector<double> angles) {
  for (double& a : angles) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
  }
  std::sort(angles.begin(), angles.end());
  double gap = kTwoPi - angles.back() + angles.front();
  for (std::size_t k = 1; k < angles.size(); ++k) gap = std::max(gap, angles[k] - angles[k - 1]);
  return 1.0 - gap / kTwoPi;
}

void check_samples(const std::vector<ReducedSample>& samples, const SingleBasisSpec& spec,
                   bool forward) {
  const std::size_t need = 3 * static_cast<std::size_t>(spec.size());
  if (samples.size() < need) {
    throw Error(ErrorCode::InsufficientSamples, std::to_string(samples.size()) + " samples for " +
                                                    std::to_string(spec.size()) + " basis functions");
  }
  std::vector<double> angles;
  angles.reserve(samples.size());
  for (const auto& s : samples) angles.push_back(forward ? s.phi0 : s.theta0);
  if (angular_coverage(angles) < 0.9) {
    throw Error(ErrorCode::InsufficientSamples, "samples cover less than 90% of the circle");
  }
}

}  // namespace

double wrap_pi(double a) {
  double w = std::remainder(a, kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  return w;
}

double TransformSet::gamma(double theta) const {
  double c[129], s[129];
  harmonics(theta, n_g, c, s);
  double v = gamma_coeffs[0];
  for (int k = 1; k <= n_g; ++k) v += gamma_coeffs[2 * k - 1] * c[k] + gamma_coeffs[2 * k] * s[k];
  return v;
}

InverseValue TransformSet::eval_inverse(double theta, double r) const {
  const SeriesValue p = inverse_phase.eval_grad({theta, r});
  const SeriesValue s = inverse_amplitude.eval_grad({theta, r});
  InverseValue v;
  v.phi = theta + p.value;
  v.phi_theta = 1.0 + p.grad[0];
  v.phi_r = p.grad[1];
  v.sigma = s.value;
  v.sigma_theta = s.grad[0];
  v.sigma_r = s.grad[1];
  return v;
}

ForwardValue TransformSet::eval_forward(double phi, double sigma) const {
  const SeriesValue a = forward_angle.eval_grad({phi, sigma});
  const SeriesValue r = forward_radius.eval_grad({phi, sigma});
  ForwardValue v;
  v.theta = phi + a.value;
  v.theta_phi = 1.0 + a.grad[0];
  v.theta_sigma = a.grad[1];
  v.r = r.value;
  v.r_phi = r.grad[0];
  v.r_sigma = r.grad[1];
  return v;
}

bool TransformSet::in_domain(double theta, double r, double sigma_margin) const {
  const double scale = r / gamma(theta);
  if (scale < domain.scale_lo || scale > domain.scale_hi) return false;
  const double width = domain.sigma_hi - domain.sigma_lo;
  const double sigma = inverse_amplitude.eval_grad({theta, r}).value;
  return sigma >= domain.sigma_lo - sigma_margin * width &&
         sigma <= domain.sigma_hi + sigma_margin * width;
}

std::vector<Vec2> ic_grid(const LimitCycle& cycle, const IcGridOptions& options) {
  if (options.n_theta < 1 || options.n_radius < 1 || !(options.scale_lo > 0.0) ||
      !(options.scale_hi >= options.scale_lo)) {
    throw Error(ErrorCode::InvalidConfig, "invalid initial-condition grid");
  }
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(options.n_theta * options.n_radius));
  for (int a = 0; a < options.n_theta; ++a) {
    const double theta = kTwoPi * a / options.n_theta;
    const double g = cycle.gamma(theta);
    for (int b = 0; b < options.n_radius; ++b) {
      const double f = options.n_radius == 1
                           ? options.scale_lo
                           : options.scale_lo + (options.scale_hi - options.scale_lo) * b / (options.n_radius - 1);
      out.push_back(Vec2(theta, f * g));
    }
  }
  return out;
}

std::vector<ReducedSample> reduce_samples(const Averager& averager, const std::vector<Vec2>& ics,
                                          int jobs) {
  std::vector<ReducedSample> out(ics.size());
  parallel_for(ics.size(), jobs, [&](std::size_t k) { out[k] = averager.reduce(ics[k][0], ics[k][1]); });
  return out;
}

void fit_inverse_transform(TransformSet& set, const std::vector<ReducedSample>& samples,
                           const SingleBasisSpec& spec, const KappaPolicy& policy) {
  check_samples(samples, spec, false);
  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  std::vector<double> radii;
  for (const auto& s : samples) radii.push_back(s.r0);
  const double unit = amplitude_unit(radii);
  Eigen::MatrixXd design(n, spec.size());
  Eigen::MatrixXd targets(n, 2);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& s = samples[k];
    design.row(k) = single_row(spec, s.theta0, s.r0 / unit);
    targets(k, 0) = wrap_pi(s.phi0 - s.theta0);
    targets(k, 1) = s.sigma0;
  }
  const SvdContext ctx = make_svd_context(design, targets);
  const RidgeFit phase = ridge_solve(ctx, 0, policy);
  const RidgeFit amp = ridge_solve(ctx, 1, policy);
  set.inverse_phase = FittedSeries{spec, phase.q, unit};
  set.inverse_amplitude = FittedSeries{spec, amp.q, unit};
  set.kappa[0] = phase.kappa;
  set.kappa[1] = amp.kappa;
}

void fit_forward_transform(TransformSet& set, const std::vector<ReducedSample>& samples,
                           const SingleBasisSpec& spec, const KappaPolicy& policy) {
  check_samples(samples, spec, true);
  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  std::vector<double> amps;
  for (const auto& s : samples) amps.push_back(std::abs(s.sigma0));
  const double unit = amplitude_unit(amps);
  Eigen::MatrixXd design(n, spec.size());
  Eigen::MatrixXd targets(n, 2);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& s = samples[k];
    design.row(k) = single_row(spec, s.phi0, s.sigma0 / unit);
    targets(k, 0) = wrap_pi(s.theta0 - s.phi0);
    targets(k, 1) = s.r0;
  }
  const SvdContext ctx = make_svd_context(design, targets);
  const RidgeFit angle = ridge_solve(ctx, 0, policy);
  const RidgeFit radius = ridge_solve(ctx, 1, policy);
  set.forward_angle = FittedSeries{spec, angle.q, unit};
  set.forward_radius = FittedSeries{spec, radius.q, unit};
  set.kappa[2] = angle.kappa;
  set.kappa[3] = radius.kappa;
}

TransformBuild build_transforms(const Averager& averager, const TransformOptions& options) {
  TransformBuild out;
  const LimitCycle& cycle = averager.cycle();
  out.samples = reduce_samples(averager, ic_grid(cycle, options.grid), options.jobs);
  TransformSet& set = out.set;
  set.gamma_coeffs = cycle.gamma_coeffs;
  set.n_g = cycle.n_g;
  set.omega = cycle.omega;
  set.lambda = averager.lambda();
  auto& d = set.domain;
  d.r_lo = d.scale_lo = d.sigma_lo = INFINITY;
  d.r_hi = d.scale_hi = d.sigma_hi = -INFINITY;
  for (const auto& s : out.samples) {
    const double scale = s.r0 / cycle.gamma(s.theta0);
    d.r_lo = std::min(d.r_lo, s.r0);
    d.r_hi = std::max(d.r_hi, s.r0);
    d.scale_lo = std::min(d.scale_lo, scale);
    d.scale_hi = std::max(d.scale_hi, scale);
    d.sigma_lo = std::min(d.sigma_lo, s.sigma0);
    d.sigma_hi = std::max(d.sigma_hi, s.sigma0);
  }
  fit_inverse_transform(set, out.samples, options.inverse_spec);
  fit_forward_transform(set, out.samples, options.forward_spec);
  return out;
}

std::vector<Vec2> interior_grid(const TransformSet& set, int n) {
  const double w = set.domain.scale_hi - set.domain.scale_lo;
  const double lo = set.domain.scale_lo + 0.05 * w;
  const double hi = set.domain.scale_hi - 0.05 * w;
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n * n));
  for (int a = 0; a < n; ++a) {
    const double theta = kTwoPi * a / n;
    const double g = set.gamma(theta);
    for (int b = 0; b < n; ++b) {
      const double f = n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * b / (n - 1);
      out.push_back(Vec2(theta, f * g));
    }
  }
  return out;
}

InvarianceResidual invariance_residual(const TransformSet& set, const PlanarField& vf,
                                       const std::vector<Vec2>& grid, double omega, double lambda) {
  InvarianceResidual out;
  double sp = 0.0, sa = 0.0;
  for (const Vec2& x : grid) {
    const Vec2 f = vf(x);
    const InverseValue v = set.eval_inverse(x[0], x[1]);
    const double rp = f[0] * v.phi_theta + f[1] * v.phi_r - omega;
    const double ra = f[0] * v.sigma_theta + f[1] * v.sigma_r - lambda * v.sigma;
    sp += rp * rp;
    sa += ra * ra;
    out.sigma_max = std::max(out.sigma_max, std::abs(v.sigma));
  }
  out.phase_rms = std::sqrt(sp / grid.size());
  out.amplitude_rms = std::sqrt(sa / grid.size());
  return out;
}

double composition_error(const TransformSet& set, const std::vector<Vec2>& grid) {
  double err = 0.0;
  for (const Vec2& x : grid) {
    const InverseValue v = set.eval_inverse(x[0], x[1]);
    const ForwardValue f = set.eval_forward(v.phi, v.sigma);
    err = std::max({err, std::abs(wrap_pi(f.theta - x[0])), std::abs(f.r - x[1])});
  }
  return err;
}

TransformOptions default_transform_options(ModelKind kind) {
  TransformOptions o;
  if (!is_polar_native(kind)) {
    o.grid.n_theta = 61;
    o.grid.n_radius = 25;
    o.inverse_spec = {8, 14};
    o.forward_spec = {10, 14};
  }
  return o;
}

}  // namespace pharec
