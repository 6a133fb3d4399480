#include "pharec/limit_cycle.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pharec/basis.hpp"
#include "pharec/error.hpp"
#include "pharec/ridge.hpp"

namespace pharec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Real eigenvalues of a 2x2 matrix, or false when they are complex.
bool real_eigenvalues(const Mat2& m, double& e1, double& e2) {
  const double half_tr = 0.5 * m.trace();
  const double disc = half_tr * half_tr - m.determinant();
  if (disc < 0.0) return false;
  const double root = std::sqrt(disc);
  e1 = half_tr + root;
  e2 = half_tr - root;
  return true;
}

Vec2 eigenvector(const Mat2& m, double mu) {
  const Vec2 a(m(0, 1), mu - m(0, 0));
  const Vec2 b(mu - m(1, 1), m(1, 0));
  const Vec2 v = a.norm() >= b.norm() ? a : b;
  if (v.norm() == 0.0) return Vec2(0.0, 1.0);
  return v.normalized();
}

}  // namespace

double LimitCycle::gamma(double theta) const {
  double c[129], s[129];
  harmonics(theta, n_g, c, s);
  double v = gamma_coeffs[0];
  for (int k = 1; k <= n_g; ++k) v += gamma_coeffs[2 * k - 1] * c[k] + gamma_coeffs[2 * k] * s[k];
  return v;
}

double LimitCycle::gamma_derivative(double theta) const {
  double c[129], s[129];
  harmonics(theta, n_g, c, s);
  double v = 0.0;
  for (int k = 1; k <= n_g; ++k) {
    v += k * (-gamma_coeffs[2 * k - 1] * s[k] + gamma_coeffs[2 * k] * c[k]);
  }
  return v;
}

double LimitCycle::gamma_max() const {
  double m = -INFINITY;
  for (int i = 0; i < 720; ++i) m = std::max(m, gamma(kTwoPi * i / 720.0));
  return m;
}

double LimitCycle::gamma_min() const {
  double m = INFINITY;
  for (int i = 0; i < 720; ++i) m = std::min(m, gamma(kTwoPi * i / 720.0));
  return m;
}

LimitCycle find_limit_cycle(const PlanarField& vf, const Vec2& seed, const CycleOptions& options) {
  if (!(options.step > 0.0)) throw Error(ErrorCode::InvalidStep, "cycle search step must be positive");
  if (options.n_g < 0 || options.n_g > 128) throw Error(ErrorCode::InvalidConfig, "n_g must be in [0, 128]");
  if (!(seed[1] > 0.0)) throw Error(ErrorCode::NonPositiveRadius, "seed radius must be positive");
  const double h = options.step;
  Vec2 x = seed;
  double t = 0.0;
  double section = kTwoPi * (std::floor(x[0] / kTwoPi) + 1.0);
  std::vector<double> return_t, return_r;
  const double r_cap = 1e3 * seed[1];
  long steps_since_return = 0;
  const long stall_limit = static_cast<long>(1e7);
  bool converged = false;
  std::size_t settled_at = 0;
  double last_change = INFINITY;
  while (!converged) {
    const Vec2 next = rk4_step(vf, x, h);
    if (!next.allFinite()) throw Error(ErrorCode::NonFiniteState, "cycle search diverged at t=" + std::to_string(t));
    if (!(next[1] > 0.0) || next[1] > r_cap) {
      throw Error(ErrorCode::NoConvergence, "cycle search left the annulus at t=" + std::to_string(t));
    }
    if (next[0] >= section && x[0] < section) {
      // Bisection on the partial step length places the state on the section.
      double lo = 0.0, hi = h;
      for (int it = 0; it < 200 && hi - lo > 1e-16 * h; ++it) {
        const double mid = 0.5 * (lo + hi);
        (rk4_step(vf, x, mid)[0] < section ? lo : hi) = mid;
      }
      const Vec2 at = rk4_step(vf, x, hi);
      return_t.push_back(t + hi);
      return_r.push_back(at[1]);
      section += kTwoPi;
      steps_since_return = 0;
      const std::size_t n = return_r.size();
      if (n >= 2) {
        const double change = std::abs(return_r[n - 1] - return_r[n - 2]);
        if (settled_at == 0 && change < options.return_tol) settled_at = n;
        // Past the tolerance, continue until returns stop changing at round-off.
        if (settled_at != 0 &&
            (change <= 1e-15 * return_r[n - 1] || change >= last_change || n >= settled_at + 100)) {
          converged = true;
        }
        last_change = change;
      }
      if (!converged && settled_at == 0 && static_cast<int>(n) > options.max_periods) {
        throw Error(ErrorCode::NoConvergence,
                    "return map did not converge within " + std::to_string(options.max_periods) + " periods");
      }
    }
    x = next;
    t += h;
    if (++steps_since_return > stall_limit) {
      throw Error(ErrorCode::NoConvergence, "trajectory does not return to the section");
    }
  }
  LimitCycle cycle;
  const std::size_t n = return_t.size();
  cycle.period = return_t[n - 1] - return_t[n - 2];
  cycle.omega = kTwoPi / cycle.period;
  cycle.r_section = return_r[n - 1];
  cycle.n_g = options.n_g;
  cycle.step = cycle.period / options.steps_per_period;

  const Trajectory orbit = integrate(vf, Vec2(0.0, cycle.r_section), cycle.period, cycle.step);
  const SingleBasisSpec spec{0, options.n_g};
  const Eigen::Index rows = static_cast<Eigen::Index>(orbit.states.size()) - 1;
  Eigen::MatrixXd design(rows, spec.size());
  Eigen::VectorXd target(rows);
  for (Eigen::Index k = 0; k < rows; ++k) {
    design.row(k) = single_row(spec, orbit.states[k][0], 1.0);
    target[k] = orbit.states[k][1];
  }
  // Two refinement passes remove least-squares round-off from the profile.
  const SvdContext ctx = make_svd_context(design, target);
  cycle.gamma_coeffs = ridge_solve(ctx, 0, KappaPolicy::fixed(0.0)).q;
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::VectorXd resid = target - design * cycle.gamma_coeffs;
    cycle.gamma_coeffs += ridge_fit(design, resid, KappaPolicy::fixed(0.0)).q;
  }
  double res = 0.0;
  for (Eigen::Index k = 0; k < rows; ++k) {
    res = std::max(res, std::abs(target[k] - cycle.gamma(orbit.states[k][0])));
  }
  cycle.profile_residual = res;
  if (!(cycle.gamma_min() > 0.0)) throw Error(ErrorCode::NoConvergence, "fitted cycle profile is not positive");
  return cycle;
}

PlanarJacobian finite_difference_jacobian(const PlanarField& vf, double h) {
  return [vf, h](const Vec2& x) {
    Mat2 j;
    for (int c = 0; c < 2; ++c) {
      Vec2 xp = x, xm = x;
      xp[c] += h;
      xm[c] -= h;
      j.col(c) = (vf(xp) - vf(xm)) / (2.0 * h);
    }
    return j;
  };
}

FloquetResult floquet_from_monodromy(const PlanarField& vf, const PlanarJacobian& jacobian,
                                     const LimitCycle& cycle) {
  const PlanarJacobian jac = jacobian ? jacobian : finite_difference_jacobian(vf);
  const TangentTrajectory tt =
      integrate_with_tangent(vf, jac, Vec2(0.0, cycle.r_section), cycle.period, cycle.step);
  FloquetResult out;
  out.monodromy = tt.tangent.back();
  double e1 = 0.0, e2 = 0.0;
  if (!real_eigenvalues(out.monodromy, e1, e2)) {
    throw Error(ErrorCode::ComplexMultiplier, "monodromy has complex multipliers");
  }
  const bool both_off = std::abs(e1 - 1.0) > 1e-3 && std::abs(e2 - 1.0) > 1e-3;
  double nontrivial = std::abs(e1 - 1.0) >= std::abs(e2 - 1.0) ? e1 : e2;
  double trivial = nontrivial == e1 ? e2 : e1;
  if (both_off) {
    nontrivial = std::min(e1, e2);
    trivial = std::max(e1, e2);
  }
  if (!(nontrivial > 0.0)) {
    throw Error(ErrorCode::ComplexMultiplier, "nontrivial multiplier is not positive");
  }
  out.multiplier = nontrivial;
  out.trivial_multiplier = trivial;
  out.lambda = std::log(nontrivial) / cycle.period;
  if (!(out.lambda < 0.0)) throw Error(ErrorCode::NoConvergence, "cycle is not attracting");
  return out;
}

LimitCycle analyze_cycle(const PlanarField& vf, const PlanarJacobian& jacobian, const Vec2& seed,
                         const CycleOptions& options) {
  LimitCycle cycle = find_limit_cycle(vf, seed, options);
  const FloquetResult fl = floquet_from_monodromy(vf, jacobian, cycle);
  cycle.lambda = fl.lambda;
  cycle.monodromy = fl.monodromy;
  return cycle;
}

K1Curve k1_oracle(const PlanarField& vf, const PlanarJacobian& jacobian, const LimitCycle& cycle,
                  double lambda) {
  const PlanarJacobian jac = jacobian ? jacobian : finite_difference_jacobian(vf);
  constexpr int kPoints = 256;
  constexpr int kSub = 8;
  const TangentTrajectory tt = integrate_with_tangent(
      vf, jac, Vec2(0.0, cycle.r_section), cycle.period, cycle.period / (kPoints * kSub));
  const Mat2& m = tt.tangent.back();
  const double mu = std::exp(lambda * cycle.period);
  Vec2 v0 = eigenvector(m, mu);
  if (std::abs(v0[1]) > 1e-14) v0 /= v0[1];
  K1Curve out;
  for (int p = 0; p <= kPoints; ++p) {
    const std::size_t idx = static_cast<std::size_t>(p) * kSub;
    const double t = tt.base.times[idx];
    out.phi.push_back(cycle.omega * t);
    out.k1.push_back(std::exp(-lambda * t) * (tt.tangent[idx] * v0));
  }
  return out;
}

}  // namespace pharec
