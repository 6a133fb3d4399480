#pragma once

#include <array>
#include <vector>

#include "pharec/basis.hpp"
#include "pharec/models.hpp"
#include "pharec/ridge.hpp"
#include "pharec/trials.hpp"

namespace pharec {

struct ChannelDerivative {
  std::vector<double> theta_dot;
  std::vector<double> r_dot;
};

// Unwraps θ, then central second-order differences inside and one-sided
// second-order differences at both ends.
ChannelDerivative differentiate_channel(const std::vector<double>& times,
                                        const std::vector<Vec2>& channel);
std::vector<ChannelDerivative> differentiate_trial(const Trial& trial);

struct FitDiagnostics {
  double kappa = 0.0;
  double gcv = 0.0;
  double residual_norm = 0.0;
  double effective_dof = 0.0;
  long rows = 0;
};

struct NetworkVF {
  std::size_t n_osc = 0;
  SingleBasisSpec single;
  PairBasisSpec pair;
  std::vector<double> units;  // amplitude unit per oscillator
  // uncoupled[i][c], c = 0 for dθ/dt and 1 for dr/dt
  std::vector<std::array<FittedSeries, 2>> uncoupled;
  // coupling[i][j][c]; empty coefficients when i == j
  std::vector<std::vector<std::array<FittedSeries, 2>>> coupling;
  std::vector<std::array<FitDiagnostics, 2>> diagnostics;

  Vec2 eval_uncoupled(std::size_t i, double theta, double r) const;
  Vec2 eval_coupling(std::size_t i, std::size_t j, double theta_i, double r_i, double theta_j,
                     double r_j) const;
  std::vector<Vec2> eval(const std::vector<Vec2>& states) const;
  // Fitted uncoupled field of oscillator i with its analytic Jacobian.
  PlanarSystem uncoupled_polar(std::size_t i) const;
  // max |c| over every coupling coefficient of oscillator i.
  double coupling_sup_norm(std::size_t i) const;
};

struct VfFitOptions {
  SingleBasisSpec single;
  PairBasisSpec pair;
  int stride = 20;  // row subsampling after differentiation
  int trim = 2;     // samples dropped at each trial end
  KappaPolicy policy = KappaPolicy::gcv();
  int jobs = 1;
  int coverage_bins = 12;
  double coverage_fraction = 0.8;
};

// Wilson-Cowan needs more radial and angular terms for its sharp relaxation
// profile, and fewer coupling amplitude powers to stay well conditioned.
VfFitOptions default_vf_options(ModelKind kind);

NetworkVF fit_network_vf(const TrialSet& trials, const VfFitOptions& options);

}  // namespace pharec
