#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pharec/limit_cycle.hpp"
#include "pharec/models.hpp"

namespace pharec {

// One realization: observable (θ, r) per oscillator on a shared time base.
struct Trial {
  std::vector<double> times;
  std::vector<std::vector<Vec2>> osc;  // osc[i][k]
  std::size_t size() const { return times.size(); }
};

struct TrialSet {
  std::vector<Trial> trials;
  std::size_t n_osc = 0;
  double step = 0.0;
  std::string provenance = "measured";
};

struct TrialOptions {
  int count = 100;
  double periods = 6.0;  // duration in periods of the slowest oscillator
  double step = 0.0;     // 0 selects min_i T_i / 2000
  double scale_lo = 0.75;
  double scale_hi = 1.35;
  std::uint64_t seed = 1;
  int jobs = 1;
};

// Initial conditions θ ~ U[0, 2π), r = f γ_i(θ) with f ~ U[scale_lo, scale_hi];
// polar-native models integrate in (θ, r), Cartesian ones in (x, y).
TrialSet simulate_trials(const NetworkModel& model, const std::vector<LimitCycle>& cycles,
                         const TrialOptions& options);

// Cycle of oscillator i of the uncoupled model with its monodromy exponent.
LimitCycle model_cycle(const NetworkModel& model, std::size_t i, const CycleOptions& options = {});

}  // namespace pharec
