#pragma once

#include <vector>

#include "pharec/limit_cycle.hpp"
#include "pharec/ode.hpp"

namespace pharec {

struct ObservableDeviation {
  std::vector<double> times;
  std::vector<double> rho;  // r(t) - γ(θ(t))
  double floor = 0.0;
  std::size_t cutoff_index = 0;  // last sample with |ρ| >= floor
  double t1 = 0.0;
  double t2 = 0.0;
  double period = 0.0;
  int window_periods = 2;  // 2 normally, 1 when only one period precedes the cutoff
};

// Precision floor max(1e-12, 1e-12 |ρ(0)|, extra_floor). The window is the
// last two periods before the cutoff, or the last one if only one fits.
ObservableDeviation observable_deviation(const std::vector<double>& times,
                                         const std::vector<double>& rho, double period,
                                         double extra_floor = 0.0);
ObservableDeviation observable_deviation(const Trajectory& trajectory, const LimitCycle& cycle,
                                         double extra_floor = 0.0);

// Corrects lambda0 by the slope between the window's two period means of
// |ρ| e^{-λ0 t}; exact for ρ = e^{λt} times any periodic factor.
double refine_lambda(const ObservableDeviation& dev, double lambda0);

struct ReducedSample {
  double theta0 = 0.0;
  double r0 = 0.0;
  double phi0 = 0.0;    // [0, 2π)
  double sigma0 = 0.0;  // scaled amplitude
  double lambda_used = 0.0;
  bool on_cycle = false;  // σ0 set to 0 because the deviation is below the floor
  int window_periods = 0;
};

struct AveragingOptions {
  int max_periods = 400;
  double escape_factor = 10.0;  // basin bound: r < escape_factor max γ
  // The floor also exceeds min(residual_floor_factor * profile residual,
  // window_start_cap * e^{2λT}): ρ dominates the profile error inside the
  // window while ρ at the window start stays below window_start_cap.
  double residual_floor_factor = 1e4;
  double window_start_cap = 1e-3;
};

// Finite-time Fourier/Laplace averages along trajectories of an uncoupled
// polar field; the on-cycle reference angle is computed once.
class Averager {
 public:
  Averager(PlanarField vf, LimitCycle cycle, double lambda, AveragingOptions options = {});

  ReducedSample reduce(double theta0, double r0) const;
  // Simulates until a full period stays below the precision floor.
  Trajectory simulate_to_floor(double theta0, double r0) const;

  const LimitCycle& cycle() const { return cycle_; }
  double lambda() const { return lambda_; }
  double floor_extra() const;

 private:
  double raw_angle(const Trajectory& traj, double t1, double t2) const;

  PlanarField vf_;
  LimitCycle cycle_;
  double lambda_;
  AveragingOptions options_;
  double reference_angle_ = 0.0;
};

ReducedSample reduced_coordinates(const PlanarField& vf, const LimitCycle& cycle, double lambda,
                                  double theta0, double r0);

// Log-slope Floquet exponent: median over initial conditions of the window
// slope, independent of any prior estimate.
double log_slope_lambda(const Averager& averager, const std::vector<Vec2>& initial_conditions);

// Initial conditions (θ, f γ(θ)) used for the log-slope estimate.
std::vector<Vec2> lambda_probe_points(const LimitCycle& cycle);

}  // namespace pharec
