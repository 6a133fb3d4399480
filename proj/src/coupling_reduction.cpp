#include "pharec/coupling_reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "pharec/error.hpp"
#include "pharec/parallel.hpp"

namespace pharec {

namespace {

constexpr int kMaxBatches = 64;

std::uint64_t pair_seed(std::uint64_t seed, std::size_t i, std::size_t j) {
  return seed * 1000003ULL + 1009ULL * i + j;
}

}  // namespace

RadiusRange evaluation_radius_range(double r_min, double r_max) {
  if (!(r_min > 0.0) || !(r_max >= r_min) || !std::isfinite(r_max)) {
    throw Error(ErrorCode::EmptyRadiusData, "radius statistics missing or invalid");
  }
  RadiusRange out;
  out.lo = 0.8 * r_max;
  out.hi = 1.25 * r_min;
  if (!(out.lo < out.hi)) {
    out.lo = 0.8 * r_min;
    out.hi = 1.25 * r_max;
    out.fallback = true;
  }
  return out;
}

std::vector<GridPoint> sample_evaluation_grid(const RadiusRange& range_i, const RadiusRange& range_j,
                                              std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> ri(range_i.lo, range_i.hi);
  std::uniform_real_distribution<double> rj(range_j.lo, range_j.hi);
  std::vector<GridPoint> out(count);
  for (auto& p : out) {
    p.theta_i = angle(rng);
    p.r_i = ri(rng);
    p.theta_j = angle(rng);
    p.r_j = rj(rng);
  }
  return out;
}

std::vector<ReducedPoint> reduced_coupling_samples(const CouplingField& coupling,
                                                   const InverseMap& inverse_i,
                                                   const InverseMap& inverse_j,
                                                   const std::vector<GridPoint>& points,
                                                   const DomainTest& domain_i,
                                                   const DomainTest& domain_j) {
  std::vector<ReducedPoint> out(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    const GridPoint& p = points[k];
    const InverseValue vi = inverse_i(p.theta_i, p.r_i);
    const InverseValue vj = inverse_j(p.theta_j, p.r_j);
    const Vec2 g = coupling(p);
    ReducedPoint& o = out[k];
    o.phi_i = vi.phi;
    o.sigma_i = vi.sigma;
    o.phi_j = vj.phi;
    o.sigma_j = vj.sigma;
    o.g_phi = vi.phi_theta * g[0] + vi.phi_r * g[1];
    o.g_sigma = vi.sigma_theta * g[0] + vi.sigma_r * g[1];
    o.in_domain = (!domain_i || domain_i(p.theta_i, p.r_i)) && (!domain_j || domain_j(p.theta_j, p.r_j)) &&
                  std::isfinite(o.g_phi) && std::isfinite(o.g_sigma);
  }
  return out;
}

const PairCoupling& ReducedCoupling::at(std::size_t i, std::size_t j) const {
  const auto it = pairs.find({i, j});
  if (it == pairs.end()) {
    throw Error(ErrorCode::UnknownPair, "no reduced coupling for pair (" + std::to_string(i) + ", " +
                                            std::to_string(j) + ")");
  }
  return it->second;
}

double ReducedCoupling::sup_norm(std::size_t i, std::size_t j) const {
  const PairCoupling& pc = at(i, j);
  return std::max(pc.p_phi.cwiseAbs().maxCoeff(), pc.p_sigma.cwiseAbs().maxCoeff());
}

namespace {

Eigen::VectorXd to_raw(const Eigen::VectorXd& p, const PairBasisSpec& spec, double ui, double uj) {
  Eigen::VectorXd out = p;
  for (int k = 0; k < out.size(); ++k) {
    const PairTerm t = pair_term(spec, k);
    out[k] /= std::pow(ui, t.power_i) * std::pow(uj, t.power_j);
  }
  return out;
}

}  // namespace

Eigen::VectorXd PairCoupling::raw_phi(const PairBasisSpec& spec) const {
  return to_raw(p_phi, spec, unit_i, unit_j);
}

Eigen::VectorXd PairCoupling::raw_sigma(const PairBasisSpec& spec) const {
  return to_raw(p_sigma, spec, unit_i, unit_j);
}

PairCoupling fit_reduced_coupling(const std::vector<ReducedPoint>& samples, const PairBasisSpec& spec,
                                  const KappaPolicy& policy) {
  const int m = spec.size();
  std::vector<const ReducedPoint*> kept;
  kept.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.in_domain) kept.push_back(&s);
  }
  if (kept.size() < static_cast<std::size_t>(10 * m)) {
    throw Error(ErrorCode::InsufficientSamples, std::to_string(kept.size()) +
                                                    " reduced-coupling samples survive, need " +
                                                    std::to_string(10 * m));
  }
  const Eigen::Index n = static_cast<Eigen::Index>(kept.size());
  std::vector<double> ai, aj;
  ai.reserve(kept.size());
  aj.reserve(kept.size());
  for (const ReducedPoint* s : kept) {
    ai.push_back(std::abs(s->sigma_i));
    aj.push_back(std::abs(s->sigma_j));
  }
  const double ui = amplitude_unit(std::move(ai));
  const double uj = amplitude_unit(std::move(aj));
  Eigen::MatrixXd design(n, m);
  Eigen::MatrixXd targets(n, 2);
  for (Eigen::Index k = 0; k < n; ++k) {
    const ReducedPoint& s = *kept[k];
    design.row(k) = pair_row(spec, s.phi_i, s.sigma_i / ui, s.phi_j, s.sigma_j / uj);
    targets(k, 0) = s.g_phi;
    targets(k, 1) = s.g_sigma;
  }
  const SvdContext ctx = make_svd_context(design, targets);
  const RidgeFit fp = ridge_solve(ctx, 0, policy);
  const RidgeFit fs = ridge_solve(ctx, 1, policy);
  PairCoupling out;
  out.p_phi = fp.q;
  out.p_sigma = fs.q;
  out.unit_i = ui;
  out.unit_j = uj;
  out.kappa_phi = fp.kappa;
  out.kappa_sigma = fs.kappa;
  out.samples = static_cast<long>(n);
  return out;
}

std::vector<RadiusStats> radius_statistics(const TrialSet& trials, double settle_fraction) {
  if (!(settle_fraction >= 0.0 && settle_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "settle fraction must lie in [0, 1)");
  }
  std::vector<RadiusStats> out(trials.n_osc);
  for (std::size_t i = 0; i < trials.n_osc; ++i) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Trial& t : trials.trials) {
      const auto& ch = t.osc.at(i);
      const std::size_t first = static_cast<std::size_t>(settle_fraction * static_cast<double>(ch.size()));
      for (std::size_t k = first; k < ch.size(); ++k) {
        lo = std::min(lo, ch[k][1]);
        hi = std::max(hi, ch[k][1]);
      }
    }
    if (!std::isfinite(lo)) throw Error(ErrorCode::EmptyRadiusData, "no radius samples");
    out[i] = {lo, hi};
  }
  return out;
}

InverseMap fitted_inverse(const TransformSet& set) {
  return [&set](double theta, double r) { return set.eval_inverse(theta, r); };
}

DomainTest fitted_domain(const TransformSet& set, double sigma_margin) {
  return [&set, sigma_margin](double theta, double r) { return set.in_domain(theta, r, sigma_margin); };
}

std::vector<ReducedPoint> collect_pair_samples(const CouplingField& coupling, const InverseMap& inverse_i,
                                               const InverseMap& inverse_j, const DomainTest& domain_i,
                                               const DomainTest& domain_j, const RadiusRange& range_i,
                                               const RadiusRange& range_j, std::size_t target,
                                               std::uint64_t seed, int jobs) {
  std::vector<ReducedPoint> kept;
  kept.reserve(target);
  for (int batch = 0; batch < kMaxBatches && kept.size() < target; ++batch) {
    const std::vector<GridPoint> points =
        sample_evaluation_grid(range_i, range_j, target, seed + static_cast<std::uint64_t>(batch));
    // per-chunk evaluation keeps the output order independent of scheduling
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(points.size(), 64));
    std::vector<std::vector<ReducedPoint>> parts(chunks);
    parallel_for(chunks, jobs, [&](std::size_t c) {
      const std::size_t b = points.size() * c / chunks, e = points.size() * (c + 1) / chunks;
      const std::vector<GridPoint> slice(points.begin() + b, points.begin() + e);
      parts[c] = reduced_coupling_samples(coupling, inverse_i, inverse_j, slice, domain_i, domain_j);
    });
    for (const auto& part : parts) {
      for (const auto& s : part) {
        if (s.in_domain && kept.size() < target) kept.push_back(s);
      }
    }
  }
  if (kept.size() < target) {
    throw Error(ErrorCode::InsufficientSamples,
                "only " + std::to_string(kept.size()) + " grid points inside the transform domains");
  }
  return kept;
}

ReducedCoupling reduce_network_coupling(const NetworkVF& nvf, const std::vector<TransformSet>& transforms,
                                        const std::vector<RadiusStats>& radii,
                                        const ReductionOptions& options) {
  if (transforms.size() != nvf.n_osc || radii.size() != nvf.n_osc) {
    throw Error(ErrorCode::ShapeMismatch, "one transform set and radius range per oscillator required");
  }
  if (options.points < static_cast<std::size_t>(10 * options.spec.size())) {
    throw Error(ErrorCode::InsufficientSamples, "grid must hold at least 10x the reduced basis size");
  }
  ReducedCoupling rc;
  rc.spec = options.spec;
  rc.spec.mode = PairMode::Reduced;
  for (const auto& t : transforms) {
    rc.omega.push_back(t.omega);
    rc.lambda.push_back(t.lambda);
  }
  for (std::size_t i = 0; i < nvf.n_osc; ++i) {
    for (std::size_t j = 0; j < nvf.n_osc; ++j) {
      if (i == j) continue;
      const RadiusRange ri = evaluation_radius_range(radii[i].r_min, radii[i].r_max);
      const RadiusRange rj = evaluation_radius_range(radii[j].r_min, radii[j].r_max);
      const CouplingField g = [&nvf, i, j](const GridPoint& p) {
        return nvf.eval_coupling(i, j, p.theta_i, p.r_i, p.theta_j, p.r_j);
      };
      const auto samples = collect_pair_samples(
          g, fitted_inverse(transforms[i]), fitted_inverse(transforms[j]),
          fitted_domain(transforms[i], options.sigma_margin), fitted_domain(transforms[j], options.sigma_margin),
          ri, rj, options.points, pair_seed(options.seed, i, j), options.jobs);
      PairCoupling pc = fit_reduced_coupling(samples, rc.spec);
      pc.fallback_range = ri.fallback || rj.fallback;
      rc.pairs.emplace(std::make_pair(i, j), std::move(pc));
    }
  }
  return rc;
}

Heatmap heatmap_layout(const ReducedCoupling& rc, std::size_t i, std::size_t j, const std::string& equation) {
  const PairCoupling& pc = rc.at(i, j);
  if (equation != "phi" && equation != "sigma") {
    throw Error(ErrorCode::InvalidConfig, "equation must be phi or sigma, got " + equation);
  }
  const PairBasisSpec& spec = rc.spec;
  const Eigen::VectorXd p = equation == "phi" ? pc.raw_phi(spec) : pc.raw_sigma(spec);
  if (p.size() != spec.size()) throw Error(ErrorCode::ShapeMismatch, "coefficient length mismatch");
  Heatmap map;
  map.i = i;
  map.j = j;
  map.equation = equation;
  const auto combos = spec.amplitude_combos();
  for (std::size_t c = 0; c < combos.size(); ++c) {
    HeatmapPanel panel;
    panel.power_i = combos[c].first;
    panel.power_j = combos[c].second;
    for (int o = 0; o < spec.own_count(); ++o) panel.row_labels.push_back(own_factor_label(o, "phi_i"));
    for (int q = 0; q < spec.input_count(); ++q) panel.col_labels.push_back(input_factor_label(q, "phi_j"));
    panel.cells.resize(spec.own_count(), spec.input_count());
    for (int o = 0; o < spec.own_count(); ++o) {
      for (int q = 0; q < spec.input_count(); ++q) {
        panel.cells(o, q) = p[pair_index(spec, static_cast<int>(c), o, q)];
      }
    }
    map.panels.push_back(std::move(panel));
  }
  return map;
}

Eigen::VectorXd flatten_heatmap(const Heatmap& map, const PairBasisSpec& spec) {
  Eigen::VectorXd out(spec.size());
  if (map.panels.size() != spec.amplitude_combos().size()) {
    throw Error(ErrorCode::ShapeMismatch, "panel count does not match the basis");
  }
  for (std::size_t c = 0; c < map.panels.size(); ++c) {
    const Eigen::MatrixXd& cells = map.panels[c].cells;
    if (cells.rows() != spec.own_count() || cells.cols() != spec.input_count()) {
      throw Error(ErrorCode::ShapeMismatch, "panel shape does not match the basis");
    }
    for (int o = 0; o < spec.own_count(); ++o) {
      for (int q = 0; q < spec.input_count(); ++q) out[pair_index(spec, static_cast<int>(c), o, q)] = cells(o, q);
    }
  }
  return out;
}

}  // namespace pharec
