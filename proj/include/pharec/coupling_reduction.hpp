#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pharec/basis.hpp"
#include "pharec/ridge.hpp"
#include "pharec/transforms.hpp"
#include "pharec/vf_reconstruction.hpp"

namespace pharec {

struct RadiusRange {
  double lo = 0.0;
  double hi = 0.0;
  bool fallback = false;  // the primary interval was empty
};

// Primary [0.8 r_max, 1.25 r_min]; when empty, [0.8 r_min, 1.25 r_max].
RadiusRange evaluation_radius_range(double r_min, double r_max);

struct GridPoint {
  double theta_i = 0.0, r_i = 0.0, theta_j = 0.0, r_j = 0.0;
};

// Uniform angles and radii; identical seeds give identical points.
std::vector<GridPoint> sample_evaluation_grid(const RadiusRange& range_i, const RadiusRange& range_j,
                                              std::size_t count, std::uint64_t seed);

struct ReducedPoint {
  double phi_i = 0.0, sigma_i = 0.0, phi_j = 0.0, sigma_j = 0.0;
  double g_phi = 0.0, g_sigma = 0.0;
  bool in_domain = true;
};

using InverseMap = std::function<InverseValue(double theta, double r)>;
using DomainTest = std::function<bool(double theta, double r)>;
using CouplingField = std::function<Vec2(const GridPoint&)>;

// g^φ = Φ_θ G^θ + Φ_r G^r and g^σ = Σ_θ G^θ + Σ_r G^r at each point.
std::vector<ReducedPoint> reduced_coupling_samples(const CouplingField& coupling,
                                                   const InverseMap& inverse_i,
                                                   const InverseMap& inverse_j,
                                                   const std::vector<GridPoint>& points,
                                                   const DomainTest& domain_i = {},
                                                   const DomainTest& domain_j = {});

// Coefficients refer to the basis in σ / unit; units are powers of two so
// raw_* recovers the coefficients in σ exactly.
struct PairCoupling {
  Eigen::VectorXd p_phi;
  Eigen::VectorXd p_sigma;
  double unit_i = 1.0;
  double unit_j = 1.0;
  double kappa_phi = 0.0;
  double kappa_sigma = 0.0;
  long samples = 0;
  bool fallback_range = false;

  Eigen::VectorXd raw_phi(const PairBasisSpec& spec) const;
  Eigen::VectorXd raw_sigma(const PairBasisSpec& spec) const;
};

struct ReducedCoupling {
  PairBasisSpec spec;  // reduced mode
  std::vector<double> omega;
  std::vector<double> lambda;
  std::map<std::pair<std::size_t, std::size_t>, PairCoupling> pairs;

  const PairCoupling& at(std::size_t i, std::size_t j) const;
  // max |p| over both equations of pair (i, j), unit-scaled basis
  double sup_norm(std::size_t i, std::size_t j) const;
};

PairCoupling fit_reduced_coupling(const std::vector<ReducedPoint>& samples, const PairBasisSpec& spec,
                                  const KappaPolicy& policy = KappaPolicy::gcv());

struct ReductionOptions {
  // σ-order 3: an order-2 truncation aliases the cubic Taylor term onto the
  // linear coefficients.
  PairBasisSpec spec{3, 2, 2, PairMode::Reduced};
  std::size_t points = 4000;  // surviving points per pair
  std::uint64_t seed = 7;
  double sigma_margin = 0.1;
  int jobs = 1;
};

struct RadiusStats {
  double r_min = 0.0;
  double r_max = 0.0;
};

// Radius extremes over the trailing (1 - settle_fraction) of every trial, so
// the initial-condition transient does not widen the range.
std::vector<RadiusStats> radius_statistics(const TrialSet& trials, double settle_fraction = 0.5);

// Draws batches until `points` survive the domain filter of both oscillators,
// then fits every ordered pair.
ReducedCoupling reduce_network_coupling(const NetworkVF& nvf, const std::vector<TransformSet>& transforms,
                                        const std::vector<RadiusStats>& radii,
                                        const ReductionOptions& options);

// Samples for one ordered pair with the batch-until-survivors rule.
std::vector<ReducedPoint> collect_pair_samples(const CouplingField& coupling, const InverseMap& inverse_i,
                                               const InverseMap& inverse_j, const DomainTest& domain_i,
                                               const DomainTest& domain_j, const RadiusRange& range_i,
                                               const RadiusRange& range_j, std::size_t target,
                                               std::uint64_t seed, int jobs);

InverseMap fitted_inverse(const TransformSet& set);
DomainTest fitted_domain(const TransformSet& set, double sigma_margin);

struct HeatmapPanel {
  int power_i = 0;
  int power_j = 0;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  Eigen::MatrixXd cells;
};

struct Heatmap {
  std::size_t i = 0, j = 0;
  std::string equation;  // "phi" or "sigma"
  std::vector<HeatmapPanel> panels;
};

// One panel per amplitude combination; rows own factors, columns input
// factors; cells hold coefficients in raw σ.
Heatmap heatmap_layout(const ReducedCoupling& rc, std::size_t i, std::size_t j, const std::string& equation);
// Inverse of heatmap_layout in enumeration order (raw σ coefficients).
Eigen::VectorXd flatten_heatmap(const Heatmap& map, const PairBasisSpec& spec);

}  // namespace pharec
