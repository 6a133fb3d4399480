#include "pharec/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "pharec/error.hpp"

namespace pharec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Trapezoid integral over [a, b] of a quantity sampled at uniform `times`,
// linearly interpolated inside the partial end intervals.
template <class Value>
auto window_integral(const std::vector<double>& times, Value&& value, double a, double b) {
  using T = decltype(value(std::size_t{0}));
  const double t0 = times.front();
  const double h = times.size() > 1 ? times[1] - times[0] : 1.0;
  const std::size_t last = times.size() - 1;
  auto interp = [&](double t, std::size_t& k) {
    double u = (t - t0) / h;
    k = std::min<std::size_t>(last - 1, static_cast<std::size_t>(std::max(0.0, std::floor(u))));
    const double w = (t - times[k]) / h;
    return static_cast<T>(value(k) * (1.0 - w) + value(k + 1) * w);
  };
  std::size_t ka = 0, kb = 0;
  const T va = interp(a, ka);
  const T vb = interp(b, kb);
  if (ka == kb) return static_cast<T>(0.5 * (va + vb) * (b - a));
  T sum = static_cast<T>(0.5 * (va + value(ka + 1)) * (times[ka + 1] - a));
  for (std::size_t k = ka + 1; k < kb; ++k) sum += static_cast<T>(0.5 * h * (value(k) + value(k + 1)));
  sum += static_cast<T>(0.5 * (value(kb) + vb) * (b - times[kb]));
  return sum;
}

double wrap_positive(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

}  // namespace

ObservableDeviation observable_deviation(const std::vector<double>& times,
                                         const std::vector<double>& rho, double period,
                                         double extra_floor) {
  if (times.size() != rho.size() || times.size() < 2) {
    throw Error(ErrorCode::ShapeMismatch, "deviation needs matching times and values");
  }
  if (!(period > 0.0)) throw Error(ErrorCode::InvalidConfig, "period must be positive");
  ObservableDeviation dev;
  dev.times = times;
  dev.rho = rho;
  dev.period = period;
  dev.floor = std::max({1e-12, 1e-12 * std::abs(rho.front()), extra_floor});
  bool any = false;
  for (std::size_t k = rho.size(); k-- > 0;) {
    if (std::abs(rho[k]) >= dev.floor) {
      dev.cutoff_index = k;
      any = true;
      break;
    }
  }
  const double span = any ? times[dev.cutoff_index] - times.front() : 0.0;
  const double eps = 1e-9 * period;
  if (span + eps >= 2.0 * period) {
    dev.window_periods = 2;
  } else if (span + eps >= period) {
    dev.window_periods = 1;
  } else {
    throw Error(ErrorCode::TooShort, "deviation reaches the precision floor within one period");
  }
  dev.t2 = times[dev.cutoff_index];
  dev.t1 = std::max(times.front(), dev.t2 - dev.window_periods * period);
  return dev;
}

ObservableDeviation observable_deviation(const Trajectory& trajectory, const LimitCycle& cycle,
                                         double extra_floor) {
  std::vector<double> rho(trajectory.states.size());
  for (std::size_t k = 0; k < rho.size(); ++k) {
    rho[k] = trajectory.states[k][1] - cycle.gamma(trajectory.states[k][0]);
  }
  return observable_deviation(trajectory.times, rho, cycle.period, extra_floor);
}

double refine_lambda(const ObservableDeviation& dev, double lambda0) {
  const double half = 0.5 * (dev.t2 - dev.t1);
  if (!(half > 0.0)) throw Error(ErrorCode::TooShort, "empty averaging window");
  auto weighted = [&](std::size_t k) {
    return std::abs(dev.rho[k]) * std::exp(-lambda0 * (dev.times[k] - dev.t1));
  };
  const double m1 = window_integral(dev.times, weighted, dev.t1, dev.t1 + half);
  const double m2 = window_integral(dev.times, weighted, dev.t1 + half, dev.t2);
  if (!(m1 > 0.0) || !(m2 > 0.0)) throw Error(ErrorCode::TooShort, "deviation vanishes in the window");
  return lambda0 + std::log(m2 / m1) / half;
}

Averager::Averager(PlanarField vf, LimitCycle cycle, double lambda, AveragingOptions options)
    : vf_(std::move(vf)), cycle_(std::move(cycle)), lambda_(lambda), options_(options) {
  const Trajectory ref = integrate(vf_, Vec2(0.0, cycle_.gamma(0.0)), cycle_.period, cycle_.step);
  reference_angle_ = raw_angle(ref, 0.0, cycle_.period);
}

double Averager::floor_extra() const {
  return std::min(options_.residual_floor_factor * cycle_.profile_residual,
                  options_.window_start_cap * std::exp(2.0 * lambda_ * cycle_.period));
}

double Averager::raw_angle(const Trajectory& traj, double t1, double t2) const {
  const double w = cycle_.omega;
  auto fourier = [&](std::size_t k) {
    const Vec2& s = traj.states[k];
    return std::complex<double>(s[1] * std::cos(s[0]), 0.0) * std::polar(1.0, -w * traj.times[k]);
  };
  const std::complex<double> avg = window_integral(traj.times, fourier, t1, t2);
  return std::arg(avg);
}

Trajectory Averager::simulate_to_floor(double theta0, double r0) const {
  if (!(r0 > 0.0)) throw Error(ErrorCode::NonPositiveRadius, "initial radius must be positive");
  const double r_max = options_.escape_factor * cycle_.gamma_max();
  const double rho0 = r0 - cycle_.gamma(theta0);
  const double floor = std::max({1e-12, 1e-12 * std::abs(rho0), floor_extra()});
  Trajectory out;
  out.coords = Coords::Polar;
  out.times.push_back(0.0);
  out.states.push_back(Vec2(theta0, r0));
  Vec2 x(theta0, r0);
  for (int p = 0; p < options_.max_periods; ++p) {
    const Trajectory chunk = integrate(vf_, x, cycle_.period, cycle_.step);
    out.step = chunk.step;
    bool quiet = true;
    const double offset = p * cycle_.period;
    for (std::size_t k = 1; k < chunk.states.size(); ++k) {
      const Vec2& s = chunk.states[k];
      if (!(s[1] > 0.0) || s[1] > r_max) {
        throw Error(ErrorCode::BasinEscape, "trajectory from (" + std::to_string(theta0) + ", " +
                                                std::to_string(r0) + ") left the basin");
      }
      if (std::abs(s[1] - cycle_.gamma(s[0])) >= floor) quiet = false;
      out.times.push_back(offset + chunk.times[k]);
      out.states.push_back(s);
    }
    x = chunk.states.back();
    if (quiet) break;
  }
  return out;
}

ReducedSample Averager::reduce(double theta0, double r0) const {
  const Trajectory traj = simulate_to_floor(theta0, r0);
  ReducedSample out;
  out.theta0 = theta0;
  out.r0 = r0;
  out.lambda_used = lambda_;
  try {
    const ObservableDeviation dev = observable_deviation(traj, cycle_, floor_extra());
    auto laplace = [&](std::size_t k) {
      return std::abs(dev.rho[k]) * std::exp(-lambda_ * dev.times[k]);
    };
    const double mag = window_integral(dev.times, laplace, dev.t1, dev.t2) / (dev.t2 - dev.t1);
    out.sigma0 = dev.rho.front() < 0.0 ? -mag : mag;
    out.window_periods = dev.window_periods;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TooShort) throw;
    out.on_cycle = true;
    out.sigma0 = 0.0;
  }
  // The last period lies on the cycle to within the floor, so the transient
  // cannot leak into the phase through the higher harmonics of r cos θ.
  const double t_end = traj.times.back();
  out.phi0 = wrap_positive(raw_angle(traj, std::max(0.0, t_end - cycle_.period), t_end) - reference_angle_);
  return out;
}

ReducedSample reduced_coordinates(const PlanarField& vf, const LimitCycle& cycle, double lambda,
                                  double theta0, double r0) {
  return Averager(vf, cycle, lambda).reduce(theta0, r0);
}

double log_slope_lambda(const Averager& averager, const std::vector<Vec2>& initial_conditions) {
  std::vector<double> estimates;
  for (const Vec2& ic : initial_conditions) {
    const Trajectory traj = averager.simulate_to_floor(ic[0], ic[1]);
    try {
      const ObservableDeviation dev =
          observable_deviation(traj, averager.cycle(), averager.floor_extra());
      if (dev.window_periods == 2) estimates.push_back(refine_lambda(dev, 0.0));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TooShort) throw;
    }
  }
  if (estimates.empty()) throw Error(ErrorCode::NoConvergence, "no two-period window for the log-slope estimate");
  std::sort(estimates.begin(), estimates.end());
  const std::size_t n = estimates.size();
  return n % 2 ? estimates[n / 2] : 0.5 * (estimates[n / 2 - 1] + estimates[n / 2]);
}

std::vector<Vec2> lambda_probe_points(const LimitCycle& cycle) {
  std::vector<Vec2> out;
  for (int a = 0; a < 6; ++a) {
    const double theta = kTwoPi * a / 6.0;
    for (double f : {0.8, 1.25}) out.push_back(Vec2(theta, f * cycle.gamma(theta)));
  }
  return out;
}

}  // namespace pharec
