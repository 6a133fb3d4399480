#include "pharec/trials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pharec/error.hpp"
#include "pharec/parallel.hpp"

namespace pharec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w >= kTwoPi ? 0.0 : w;
}

}  // namespace

LimitCycle model_cycle(const NetworkModel& model, std::size_t i, const CycleOptions& options) {
  const PlanarSystem sys = model.uncoupled_polar(i);
  Vec2 seed(0.0, 1.2);
  if (!is_polar_native(model.spec().kind)) {
    const Vec2 native = model.spec().kind == ModelKind::VanDerPol
                            ? Vec2(2.0, 0.0)
                            : Vec2(model.wc_equilibrium(i) + Vec2(0.1, 0.0));
    seed = model.to_observable(i, native);
  }
  return analyze_cycle(sys.f, sys.jac, seed, options);
}

TrialSet simulate_trials(const NetworkModel& model, const std::vector<LimitCycle>& cycles,
                         const TrialOptions& options) {
  const std::size_t n = model.size();
  if (options.count < 1) throw Error(ErrorCode::InvalidConfig, "trials.count must be positive");
  if (!(options.periods > 0.0)) throw Error(ErrorCode::InvalidConfig, "trials.periods must be positive");
  if (!(options.scale_lo > 0.0) || !(options.scale_hi >= options.scale_lo)) {
    throw Error(ErrorCode::InvalidConfig, "trials.scale range is invalid");
  }
  if (cycles.size() != n) throw Error(ErrorCode::ShapeMismatch, "one cycle per oscillator required");
  double t_max = 0.0, t_min = INFINITY;
  for (const auto& c : cycles) {
    t_max = std::max(t_max, c.period);
    t_min = std::min(t_min, c.period);
  }
  const double requested = options.step > 0.0 ? options.step : t_min / 2000.0;
  const double duration = options.periods * t_max;
  const long steps = step_count(duration, requested);
  const double h = duration / static_cast<double>(steps);

  // Per-trial initial conditions drawn sequentially so they do not depend on jobs.
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  std::uniform_real_distribution<double> scale(options.scale_lo, options.scale_hi);
  std::vector<std::vector<Vec2>> ics(options.count, std::vector<Vec2>(n));
  for (auto& ic : ics) {
    for (std::size_t i = 0; i < n; ++i) {
      const double theta = angle(rng);
      const double f = scale(rng);
      ic[i] = Vec2(theta, f * cycles[i].gamma(theta));
    }
  }

  TrialSet set;
  set.n_osc = n;
  set.step = h;
  set.provenance = to_string(model.spec().kind);
  set.trials.resize(options.count);
  const SystemField f = [&model](const Eigen::VectorXd& x, Eigen::VectorXd& dx) { model.eval_flat(x, dx); };
  parallel_for(ics.size(), options.jobs, [&](std::size_t t) {
    Eigen::VectorXd x0(2 * n);
    for (std::size_t i = 0; i < n; ++i) x0.segment<2>(2 * i) = model.to_native(i, ics[t][i]);
    const std::vector<Eigen::VectorXd> path = integrate_system(f, x0, steps, h);
    Trial& trial = set.trials[t];
    trial.times.resize(path.size());
    trial.osc.assign(n, std::vector<Vec2>(path.size()));
    for (std::size_t k = 0; k < path.size(); ++k) {
      trial.times[k] = static_cast<double>(k) * h;
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 obs = model.to_observable(i, path[k].segment<2>(2 * i));
        if (!(obs[1] > 0.0)) throw Error(ErrorCode::NonPositiveRadius, "trial radius reached zero");
        trial.osc[i][k] = Vec2(wrap_angle(obs[0]), obs[1]);
      }
    }
  });
  return set;
}

}  // namespace pharec
