#include "pharec/vf_reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pharec/error.hpp"
#include "pharec/parallel.hpp"

namespace pharec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

void check_uniform(const std::vector<double>& times) {
  const double h = times[1] - times[0];
  if (!(h > 0.0)) throw Error(ErrorCode::NonUniformSampling, "times must increase");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (std::abs((times[k] - times[k - 1]) - h) > 1e-9 * h) {
      throw Error(ErrorCode::NonUniformSampling, "sample spacing differs at index " + std::to_string(k));
    }
  }
}

std::vector<double> derivative(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

}  // namespace

ChannelDerivative differentiate_channel(const std::vector<double>& times,
                                        const std::vector<Vec2>& channel) {
  if (times.size() < 5 || channel.size() != times.size()) {
    throw Error(ErrorCode::InsufficientSamples, "differentiation needs at least 5 matching samples");
  }
  check_uniform(times);
  const double h = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  std::vector<double> theta(channel.size()), r(channel.size());
  double offset = 0.0;
  for (std::size_t k = 0; k < channel.size(); ++k) {
    if (k > 0) {
      const double jump = channel[k][0] - channel[k - 1][0];
      offset -= kTwoPi * std::round(jump / kTwoPi);
    }
    theta[k] = channel[k][0] + offset;
    r[k] = channel[k][1];
  }
  return {derivative(theta, h), derivative(r, h)};
}

std::vector<ChannelDerivative> differentiate_trial(const Trial& trial) {
  std::vector<ChannelDerivative> out;
  out.reserve(trial.osc.size());
  for (const auto& ch : trial.osc) out.push_back(differentiate_channel(trial.times, ch));
  return out;
}

Vec2 NetworkVF::eval_uncoupled(std::size_t i, double theta, double r) const {
  return {uncoupled[i][0].eval_grad({theta, r}).value, uncoupled[i][1].eval_grad({theta, r}).value};
}

Vec2 NetworkVF::eval_coupling(std::size_t i, std::size_t j, double theta_i, double r_i,
                              double theta_j, double r_j) const {
  if (i >= n_osc || j >= n_osc || i == j) throw Error(ErrorCode::UnknownPair, "no coupling series for this pair");
  const std::vector<double> p{theta_i, r_i, theta_j, r_j};
  return {coupling[i][j][0].eval_grad(p).value, coupling[i][j][1].eval_grad(p).value};
}

std::vector<Vec2> NetworkVF::eval(const std::vector<Vec2>& states) const {
  if (states.size() != n_osc) throw Error(ErrorCode::ShapeMismatch, "state count must match oscillator count");
  std::vector<Vec2> out(n_osc);
  for (std::size_t i = 0; i < n_osc; ++i) {
    out[i] = eval_uncoupled(i, states[i][0], states[i][1]);
    for (std::size_t j = 0; j < n_osc; ++j) {
      if (j != i) out[i] += eval_coupling(i, j, states[i][0], states[i][1], states[j][0], states[j][1]);
    }
  }
  return out;
}

PlanarSystem NetworkVF::uncoupled_polar(std::size_t i) const {
  PlanarSystem sys;
  const auto series = uncoupled.at(i);
  sys.f = [series](const Vec2& x) {
    return Vec2(series[0].eval_grad({x[0], x[1]}).value, series[1].eval_grad({x[0], x[1]}).value);
  };
  sys.jac = [series](const Vec2& x) {
    const SeriesValue a = series[0].eval_grad({x[0], x[1]});
    const SeriesValue b = series[1].eval_grad({x[0], x[1]});
    Mat2 j;
    j << a.grad[0], a.grad[1], b.grad[0], b.grad[1];
    return j;
  };
  return sys;
}

double NetworkVF::coupling_sup_norm(std::size_t i) const {
  double m = 0.0;
  for (std::size_t j = 0; j < n_osc; ++j) {
    if (j == i) continue;
    for (const auto& s : coupling[i][j]) m = std::max(m, s.coeffs.cwiseAbs().maxCoeff());
  }
  return m;
}

NetworkVF fit_network_vf(const TrialSet& trials, const VfFitOptions& options) {
  const std::size_t n = trials.n_osc;
  if (n < 1 || trials.trials.empty()) throw Error(ErrorCode::InsufficientSamples, "no trials to fit");
  if (options.stride < 1 || options.trim < 0) throw Error(ErrorCode::InvalidConfig, "invalid stride or trim");

  std::vector<std::vector<ChannelDerivative>> derivs(trials.trials.size());
  parallel_for(trials.trials.size(), options.jobs,
               [&](std::size_t t) { derivs[t] = differentiate_trial(trials.trials[t]); });

  // Rows follow a content-defined trial order so the fit is invariant to
  // permutations of the trial set.
  std::vector<std::size_t> order(trials.trials.size());
  for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
  auto key = [&](std::size_t t) {
    const Trial& tr = trials.trials[t];
    std::vector<double> k = {static_cast<double>(tr.size())};
    if (tr.size() == 0) return k;
    k.push_back(tr.times.front());
    for (const auto& ch : tr.osc) {
      k.push_back(ch.front()[0]);
      k.push_back(ch.front()[1]);
    }
    return k;
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

  // Rows kept per trial (in sorted position) after trimming and subsampling.
  std::vector<std::size_t> rows_of;
  for (std::size_t t : order) {
    const Trial& tr = trials.trials[t];
    if (tr.osc.size() != n) throw Error(ErrorCode::ShapeMismatch, "trial oscillator count mismatch");
    const long usable = static_cast<long>(tr.size()) - 2L * options.trim;
    rows_of.push_back(usable > 0 ? static_cast<std::size_t>((usable - 1) / options.stride + 1) : 0);
  }
  std::vector<std::size_t> row_start(rows_of.size() + 1, 0);
  for (std::size_t t = 0; t < rows_of.size(); ++t) row_start[t + 1] = row_start[t] + rows_of[t];
  const Eigen::Index n_rows = static_cast<Eigen::Index>(row_start.back());

  NetworkVF nvf;
  nvf.n_osc = n;
  nvf.single = options.single;
  nvf.pair = options.pair;
  nvf.pair.mode = PairMode::Observable;
  nvf.units.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> radii;
    radii.reserve(static_cast<std::size_t>(n_rows));
    std::vector<int> bins(options.coverage_bins, 0);
    for (std::size_t t = 0; t < order.size(); ++t) {
      for (std::size_t q = 0; q < rows_of[t]; ++q) {
        const Vec2& s = trials.trials[order[t]].osc[i][options.trim + q * options.stride];
        radii.push_back(s[1]);
        double a = std::fmod(s[0], kTwoPi);
        if (a < 0.0) a += kTwoPi;
        bins[std::min(options.coverage_bins - 1, static_cast<int>(a / kTwoPi * options.coverage_bins))] = 1;
      }
    }
    int filled = 0;
    for (int b : bins) filled += b;
    if (filled < options.coverage_fraction * options.coverage_bins) {
      throw Error(ErrorCode::InsufficientCoverage, "oscillator " + std::to_string(i + 1) + " fills " +
                                                       std::to_string(filled) + " of " +
                                                       std::to_string(options.coverage_bins) + " angular bins");
    }
    nvf.units[i] = amplitude_unit(radii);
  }

  const int ns = nvf.single.size();
  const int np = nvf.pair.size();
  const int cols = ns + static_cast<int>(n - 1) * np;
  nvf.uncoupled.resize(n);
  nvf.coupling.assign(n, std::vector<std::array<FittedSeries, 2>>(n));
  nvf.diagnostics.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::MatrixXd design(n_rows, cols);
    Eigen::MatrixXd targets(n_rows, 2);
    parallel_for(order.size(), options.jobs, [&](std::size_t t) {
      const Trial& tr = trials.trials[order[t]];
      const auto& dt = derivs[order[t]];
      Eigen::RowVectorXd row(cols);
      for (std::size_t q = 0; q < rows_of[t]; ++q) {
        const std::size_t k = options.trim + q * options.stride;
        const Eigen::Index r = static_cast<Eigen::Index>(row_start[t] + q);
        const Vec2& si = tr.osc[i][k];
        single_row(nvf.single, si[0], si[1] / nvf.units[i], row.data());
        int col = ns;
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          const Vec2& sj = tr.osc[j][k];
          pair_row(nvf.pair, si[0], si[1] / nvf.units[i], sj[0], sj[1] / nvf.units[j], row.data() + col);
          col += np;
        }
        design.row(r) = row;
        targets(r, 0) = dt[i].theta_dot[k];
        targets(r, 1) = dt[i].r_dot[k];
      }
    });
    const SvdContext ctx = make_svd_context(design, targets);
    design.resize(0, 0);
    for (int c = 0; c < 2; ++c) {
      const RidgeFit fit = ridge_solve(ctx, c, options.policy);
      nvf.uncoupled[i][c] = FittedSeries{nvf.single, fit.q.head(ns), nvf.units[i], 1.0};
      int col = ns;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        nvf.coupling[i][j][c] = FittedSeries{nvf.pair, fit.q.segment(col, np), nvf.units[i], nvf.units[j]};
        col += np;
      }
      auto& d = nvf.diagnostics[i][c];
      d.kappa = fit.kappa;
      d.gcv = fit.gcv_value;
      d.residual_norm = fit.residual_norm;
      d.effective_dof = fit.effective_dof;
      d.rows = n_rows;
    }
  }
  return nvf;
}

VfFitOptions default_vf_options(ModelKind kind) {
  VfFitOptions o;
  if (kind == ModelKind::WilsonCowan) {
    o.single = {6, 12};
    o.pair = {2, 3, 3, PairMode::Observable};
  }
  return o;
}

}  // namespace pharec
