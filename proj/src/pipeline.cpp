#include "pharec/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "pharec/error.hpp"

namespace pharec {

namespace fs = std::filesystem;

namespace {

constexpr const char* kConfigSchema = "pharec.config/1";

[[noreturn]] void bad_key(const std::string& path, const std::string& why) {
  throw Error(ErrorCode::InvalidConfig, path + ": " + why);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) bad_key(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) bad_key(path.empty() ? key : path + "." + key, "unknown key");
  }
}

template <class T>
void read(const json& obj, const std::string& path, const char* key, T& out) {
  if (!obj.contains(key)) return;
  const std::string where = path.empty() ? key : path + "." + key;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    bad_key(where, "wrong type");
  } catch (const Error& e) {
    bad_key(where, e.what());
  }
}

void require(bool ok, const std::string& path, const std::string& why) {
  if (!ok) bad_key(path, why);
}

json kappa_json(const KappaPolicy& p) {
  if (p.kind == KappaPolicy::Kind::Fixed) return p.kappa;
  if (p.candidates.empty()) return "gcv";
  return {{"gcv", p.candidates}};
}

KappaPolicy kappa_from(const json& j, const std::string& path) {
  if (j.is_string() && j.get<std::string>() == "gcv") return KappaPolicy::gcv();
  if (j.is_number()) {
    const double k = j.get<double>();
    require(k >= 0.0, path, "kappa must be non-negative");
    return KappaPolicy::fixed(k);
  }
  if (j.is_object() && j.contains("gcv") && j.at("gcv").is_array()) {
    return KappaPolicy::gcv(j.at("gcv").get<std::vector<double>>());
  }
  bad_key(path, "expected \"gcv\", a number or {\"gcv\": [...]}");
}

std::string osc_tag(std::size_t i) { return "_osc" + std::to_string(i + 1); }

std::string family_of(const std::string& name) {
  const auto pos = name.find("_osc");
  return pos == std::string::npos ? name : name.substr(0, pos);
}

double pair_sup(const NetworkVF& vf, std::size_t i, std::size_t j) {
  double m = 0.0;
  for (const auto& s : vf.coupling[i][j]) {
    if (s.coeffs.size() > 0) m = std::max(m, s.coeffs.cwiseAbs().maxCoeff());
  }
  return m;
}

// Rank-1 energy of the phase tensor reshaped to own (σ_i power, own
// factor) rows by input (σ_j power, input factor) columns.
double rank1_energy(const ReducedCoupling& rc, std::size_t i, std::size_t j) {
  const PairBasisSpec& spec = rc.spec;
  const PairCoupling& pc = rc.at(i, j);
  const int np = spec.n_m + 1, no = spec.own_count(), ni = spec.input_count();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(np * no, np * ni);
  const auto combos = spec.amplitude_combos();
  for (int c = 0; c < static_cast<int>(combos.size()); ++c) {
    for (int o = 0; o < no; ++o) {
      for (int q = 0; q < ni; ++q) {
        m(combos[c].first * no + o, combos[c].second * ni + q) = pc.p_phi[pair_index(spec, c, o, q)];
      }
    }
  }
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
  const double total = sv.squaredNorm();
  return total > 0.0 ? sv[0] * sv[0] / total : 0.0;
}

template <class F>
auto run_stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("stage ") + name + ": " + e.what());
  }
}

}  // namespace

PipelineConfig default_config(std::optional<ModelKind> kind) {
  PipelineConfig c;
  if (kind) {
    c.model = default_model(*kind);
    c.transforms = default_transform_options(*kind);
    c.vf = default_vf_options(*kind);
  }
  return c;
}

PipelineConfig parse_config(const json& j) {
  check_keys(j, "", {"schema", "model", "input", "trials", "cycle", "transforms", "vf", "coupling", "jobs",
                     "tolerances", "extract"});
  std::optional<ModelKind> kind;
  if (j.contains("model")) {
    const json& m = j.at("model");
    check_keys(m, "model", {"kind", "oscillators", "coupling"});
    require(m.contains("kind") && m.at("kind").is_string(), "model.kind", "missing or not a string");
    try {
      kind = model_kind_from_string(m.at("kind").get<std::string>());
    } catch (const Error&) {
      throw Error(ErrorCode::UnknownKind, "model.kind: '" + m.at("kind").get<std::string>() + "'");
    }
  }
  PipelineConfig c = default_config(kind);
  if (kind) {
    const json& m = j.at("model");
    if (m.contains("oscillators") || m.contains("coupling")) {
      require(m.contains("oscillators") && m.contains("coupling"), "model",
              "oscillators and coupling must be given together");
      try {
        c.model = m.get<ModelSpec>();
        validate(*c.model);
      } catch (const json::exception& e) {
        bad_key("model", e.what());
      } catch (const Error& e) {
        bad_key("model", e.what());
      }
    }
  }
  if (j.contains("input")) {
    const json& in = j.at("input");
    check_keys(in, "input", {"trials_dir"});
    read(in, "input", "trials_dir", c.trials_dir);
  }
  require(c.model.has_value() || !c.trials_dir.empty() || j.contains("extract"), "model",
          "either model or input.trials_dir is required");
  if (j.contains("trials")) {
    const json& t = j.at("trials");
    check_keys(t, "trials", {"count", "periods", "step", "scale_lo", "scale_hi", "seed"});
    read(t, "trials", "count", c.trials.count);
    read(t, "trials", "periods", c.trials.periods);
    read(t, "trials", "step", c.trials.step);
    read(t, "trials", "scale_lo", c.trials.scale_lo);
    read(t, "trials", "scale_hi", c.trials.scale_hi);
    read(t, "trials", "seed", c.trials.seed);
  }
  require(c.trials.count >= 1, "trials.count", "must be at least 1");
  require(c.trials.periods > 0.0, "trials.periods", "must be positive");
  require(c.trials.step >= 0.0, "trials.step", "must be non-negative (0 selects T/2000)");
  require(c.trials.scale_lo > 0.0 && c.trials.scale_hi > c.trials.scale_lo, "trials.scale_lo",
          "need 0 < scale_lo < scale_hi");
  if (j.contains("cycle")) {
    const json& t = j.at("cycle");
    check_keys(t, "cycle", {"step", "n_g", "return_tol", "max_periods", "steps_per_period"});
    read(t, "cycle", "step", c.cycle.step);
    read(t, "cycle", "n_g", c.cycle.n_g);
    read(t, "cycle", "return_tol", c.cycle.return_tol);
    read(t, "cycle", "max_periods", c.cycle.max_periods);
    read(t, "cycle", "steps_per_period", c.cycle.steps_per_period);
  }
  require(c.cycle.step > 0.0, "cycle.step", "must be positive");
  require(c.cycle.n_g >= 1 && c.cycle.n_g <= kMaxStackHarmonics, "cycle.n_g", "out of range");
  if (j.contains("transforms")) {
    const json& t = j.at("transforms");
    check_keys(t, "transforms", {"grid", "inverse_orders", "forward_orders"});
    if (t.contains("grid")) {
      const json& g = t.at("grid");
      check_keys(g, "transforms.grid", {"n_theta", "n_radius", "scale_lo", "scale_hi"});
      read(g, "transforms.grid", "n_theta", c.transforms.grid.n_theta);
      read(g, "transforms.grid", "n_radius", c.transforms.grid.n_radius);
      read(g, "transforms.grid", "scale_lo", c.transforms.grid.scale_lo);
      read(g, "transforms.grid", "scale_hi", c.transforms.grid.scale_hi);
    }
    read(t, "transforms", "inverse_orders", c.transforms.inverse_spec);
    read(t, "transforms", "forward_orders", c.transforms.forward_spec);
  }
  require(c.transforms.grid.n_theta >= 4 && c.transforms.grid.n_radius >= 2, "transforms.grid",
          "need at least 4 angles and 2 radii");
  if (j.contains("vf")) {
    const json& t = j.at("vf");
    check_keys(t, "vf", {"single", "pair", "stride", "trim", "kappa", "coverage_bins", "coverage_fraction"});
    read(t, "vf", "single", c.vf.single);
    if (t.contains("pair")) {
      try {
        from_json(t.at("pair"), c.vf.pair);
      } catch (const std::exception& e) {
        bad_key("vf.pair", e.what());
      }
      c.vf.pair.mode = PairMode::Observable;
    }
    read(t, "vf", "stride", c.vf.stride);
    read(t, "vf", "trim", c.vf.trim);
    if (t.contains("kappa")) c.vf.policy = kappa_from(t.at("kappa"), "vf.kappa");
    read(t, "vf", "coverage_bins", c.vf.coverage_bins);
    read(t, "vf", "coverage_fraction", c.vf.coverage_fraction);
  }
  require(c.vf.stride >= 1 && c.vf.trim >= 1, "vf.stride", "stride and trim must be at least 1");
  if (j.contains("coupling")) {
    const json& t = j.at("coupling");
    check_keys(t, "coupling", {"orders", "points", "seed", "sigma_margin", "settle_fraction"});
    if (t.contains("orders")) {
      try {
        from_json(t.at("orders"), c.reduction.spec);
      } catch (const std::exception& e) {
        bad_key("coupling.orders", e.what());
      }
      c.reduction.spec.mode = PairMode::Reduced;
    }
    read(t, "coupling", "points", c.reduction.points);
    read(t, "coupling", "seed", c.reduction.seed);
    read(t, "coupling", "sigma_margin", c.reduction.sigma_margin);
    read(t, "coupling", "settle_fraction", c.settle_fraction);
  }
  require(c.reduction.points >= static_cast<std::size_t>(10 * c.reduction.spec.size()), "coupling.points",
          "must be at least 10x the reduced basis size");
  require(c.settle_fraction >= 0.0 && c.settle_fraction < 1.0, "coupling.settle_fraction", "must lie in [0, 1)");
  read(j, "", "jobs", c.jobs);
  require(c.jobs >= 1, "jobs", "must be at least 1");
  apply_jobs(c, c.jobs);
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    require(t.is_object(), "tolerances", "expected an object");
    for (const auto& [key, value] : t.items()) {
      require(value.is_number(), "tolerances." + key, "expected a number");
      c.tolerances[key] = value.get<double>();
    }
  }
  if (j.contains("extract")) {
    const json& t = j.at("extract");
    check_keys(t, "extract", {"input"});
    read(t, "extract", "input", c.extract_input);
  }
  return c;
}

json config_to_json(const PipelineConfig& c) {
  json j = json::object();
  j["schema"] = kConfigSchema;
  if (c.model) j["model"] = *c.model;
  if (!c.trials_dir.empty()) j["input"] = {{"trials_dir", c.trials_dir}};
  j["trials"] = {{"count", c.trials.count},       {"periods", c.trials.periods},
                 {"step", c.trials.step},         {"scale_lo", c.trials.scale_lo},
                 {"scale_hi", c.trials.scale_hi}, {"seed", c.trials.seed}};
  j["cycle"] = {{"step", c.cycle.step},
                {"n_g", c.cycle.n_g},
                {"return_tol", c.cycle.return_tol},
                {"max_periods", c.cycle.max_periods},
                {"steps_per_period", c.cycle.steps_per_period}};
  j["transforms"] = {{"grid",
                      {{"n_theta", c.transforms.grid.n_theta},
                       {"n_radius", c.transforms.grid.n_radius},
                       {"scale_lo", c.transforms.grid.scale_lo},
                       {"scale_hi", c.transforms.grid.scale_hi}}},
                     {"inverse_orders", c.transforms.inverse_spec},
                     {"forward_orders", c.transforms.forward_spec}};
  j["vf"] = {{"single", c.vf.single},
             {"pair", json::array({c.vf.pair.n_m, c.vf.pair.n_ki, c.vf.pair.n_kj})},
             {"stride", c.vf.stride},
             {"trim", c.vf.trim},
             {"kappa", kappa_json(c.vf.policy)},
             {"coverage_bins", c.vf.coverage_bins},
             {"coverage_fraction", c.vf.coverage_fraction}};
  j["coupling"] = {{"orders", json::array({c.reduction.spec.n_m, c.reduction.spec.n_ki, c.reduction.spec.n_kj})},
                   {"points", c.reduction.points},
                   {"seed", c.reduction.seed},
                   {"sigma_margin", c.reduction.sigma_margin},
                   {"settle_fraction", c.settle_fraction}};
  j["jobs"] = c.jobs;
  j["tolerances"] = c.tolerances;
  if (!c.extract_input.empty()) j["extract"] = {{"input", c.extract_input}};
  return j;
}

void apply_seed(PipelineConfig& config, std::uint64_t seed) {
  config.trials.seed = seed;
  config.reduction.seed = seed;
}

void apply_jobs(PipelineConfig& config, int jobs) {
  config.jobs = std::max(1, jobs);
  config.trials.jobs = config.jobs;
  config.transforms.jobs = config.jobs;
  config.vf.jobs = config.jobs;
  config.reduction.jobs = config.jobs;
}

TrialSet stage_simulate(const PipelineConfig& config) {
  return run_stage("simulate", [&] {
    if (!config.model) throw Error(ErrorCode::InvalidConfig, "simulation needs a model");
    const NetworkModel model(*config.model);
    std::vector<LimitCycle> cycles;
    for (std::size_t i = 0; i < model.size(); ++i) cycles.push_back(model_cycle(model, i, config.cycle));
    TrialSet set = simulate_trials(model, cycles, config.trials);
    set.provenance = "synthetic";
    return set;
  });
}

NetworkVF stage_reconstruct_vf(const PipelineConfig& config, const TrialSet& trials) {
  return run_stage("reconstruct-vf", [&] { return fit_network_vf(trials, config.vf); });
}

std::vector<CycleArtifact> stage_limit_cycle(const PipelineConfig& config, const NetworkVF& vf,
                                             const std::vector<RadiusStats>& radii) {
  return run_stage("limit-cycle", [&] {
    if (radii.size() != vf.n_osc) throw Error(ErrorCode::ShapeMismatch, "one radius range per oscillator required");
    std::vector<CycleArtifact> out(vf.n_osc);
    for (std::size_t i = 0; i < vf.n_osc; ++i) {
      const PlanarSystem sys = vf.uncoupled_polar(i);
      const Vec2 seed(0.0, 0.5 * (radii[i].r_min + radii[i].r_max));
      out[i].cycle = analyze_cycle(sys.f, sys.jac, seed, config.cycle);
      const Averager averager(sys.f, out[i].cycle, out[i].cycle.lambda);
      out[i].lambda_log_slope = log_slope_lambda(averager, lambda_probe_points(out[i].cycle));
    }
    return out;
  });
}

std::vector<TransformSet> stage_transforms(const PipelineConfig& config, const NetworkVF& vf,
                                           const std::vector<CycleArtifact>& cycles) {
  return run_stage("transforms", [&] {
    if (cycles.size() != vf.n_osc) throw Error(ErrorCode::ShapeMismatch, "one cycle per oscillator required");
    std::vector<TransformSet> out;
    for (std::size_t i = 0; i < vf.n_osc; ++i) {
      const PlanarSystem sys = vf.uncoupled_polar(i);
      const Averager averager(sys.f, cycles[i].cycle, cycles[i].cycle.lambda);
      out.push_back(build_transforms(averager, config.transforms).set);
    }
    return out;
  });
}

ReducedCoupling stage_reduce_coupling(const PipelineConfig& config, const NetworkVF& vf,
                                      const std::vector<TransformSet>& transforms,
                                      const std::vector<RadiusStats>& radii) {
  return run_stage("reduce-coupling", [&] { return reduce_network_coupling(vf, transforms, radii, config.reduction); });
}

bool Report::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return !r.pass || *r.pass; });
}

json report_json(const Report& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    json row = {{"name", r.name}, {"bound", r.bound}};
    row["value"] = r.value ? json(*r.value) : json(nullptr);
    row["pass"] = r.pass ? json(*r.pass) : json(nullptr);
    if (!r.note.empty()) row["note"] = r.note;
    rows.push_back(row);
  }
  return make_document("pharec.report/1", {{"model", report.model}, {"all_pass", report.all_pass()}, {"rows", rows}});
}

Report compare(const PipelineConfig& config, const Artifacts& a) {
  Report rep;
  rep.model = config.model ? to_string(config.model->kind) : "measured";
  auto add = [&](const std::string& name, double value, double bound, bool upper, const std::string& note = {}) {
    const auto it = config.tolerances.find(family_of(name));
    const double b = it != config.tolerances.end() ? it->second : bound;
    const bool ok = std::isfinite(value) && (upper ? value <= b : value >= b);
    rep.rows.push_back({name, value, b, ok, note});
  };
  auto unavailable = [&](const std::string& name, double bound) {
    const auto it = config.tolerances.find(family_of(name));
    rep.rows.push_back({name, std::nullopt, it != config.tolerances.end() ? it->second : bound, std::nullopt,
                        "oracle unavailable"});
  };
  if (!a.vf || a.cycles.size() != a.vf->n_osc || a.transforms.size() != a.vf->n_osc) {
    throw Error(ErrorCode::InvalidConfig, "compare needs the VF, cycle and transform artifacts");
  }
  const NetworkVF& vf = *a.vf;
  const bool analytic = config.model && is_polar_native(config.model->kind);
  std::optional<NetworkModel> model;
  if (config.model) model.emplace(*config.model);

  for (std::size_t i = 0; i < vf.n_osc; ++i) {
    const LimitCycle& c = a.cycles[i].cycle;
    const std::string tag = osc_tag(i);
    if (analytic) {
      const double truth = analytic_ground_truth(*config.model, i).lambda;
      add("lambda_monodromy_rel_error" + tag, std::abs(c.lambda - truth) / std::abs(truth), 1e-2, true);
      add("lambda_log_slope_rel_error" + tag, std::abs(a.cycles[i].lambda_log_slope - truth) / std::abs(truth), 5e-3,
          true);
    } else {
      unavailable("lambda_monodromy_rel_error" + tag, 1e-2);
    }
    add("lambda_routes_rel_diff" + tag, std::abs(a.cycles[i].lambda_log_slope - c.lambda) / std::abs(c.lambda), 1e-2,
        true);

    const TransformSet& set = a.transforms[i];
    const PlanarSystem sys = vf.uncoupled_polar(i);
    const auto grid = interior_grid(set);
    const InvarianceResidual res = invariance_residual(set, sys.f, grid, c.omega, c.lambda);
    add("invariance_phase_rel" + tag, res.phase_rms / c.omega, 1e-2, true);
    add("invariance_amplitude_rel" + tag, res.amplitude_rms / (std::abs(c.lambda) * res.sigma_max), 1e-2, true);
    add("composition_error" + tag, composition_error(set, grid), 1e-2, true);

    if (analytic) {
      const AnalyticGroundTruth gt = analytic_ground_truth(*config.model, i);
      double phase_err = 0.0, num = 0.0, den = 0.0;
      std::vector<std::pair<double, double>> sig;
      for (int p = 0; p < 64; ++p) {
        for (int q = 0; q <= 20; ++q) {
          const double th = 2.0 * std::numbers::pi * p / 64.0, r = 0.8 + 0.45 * q / 20.0;
          const InverseValue fit = set.eval_inverse(th, r), tru = gt.inverse(th, r);
          phase_err = std::max(phase_err, std::abs(wrap_pi(fit.phi - tru.phi)));
          sig.emplace_back(fit.sigma, tru.sigma);
          num += fit.sigma * tru.sigma;
          den += tru.sigma * tru.sigma;
        }
      }
      // best positive global scale between fitted and analytic Σ
      const double s = num / den;
      double err = 0.0, mag = 0.0;
      for (const auto& [f, t] : sig) {
        err = std::max(err, std::abs(f - s * t));
        mag = std::max(mag, std::abs(s * t));
      }
      add("inverse_phase_max_error" + tag, phase_err, 1e-2, true);
      add("inverse_amplitude_rel_error" + tag, s > 0.0 ? err / mag : INFINITY, 2e-2, true);
    } else {
      unavailable("inverse_phase_max_error" + tag, 1e-2);
      unavailable("inverse_amplitude_rel_error" + tag, 2e-2);
    }

    if (model && a.trials) {
      const PlanarSystem truth = model->uncoupled_polar(i);
      double dt = 0.0, dr = 0.0;
      for (const Trial& t : a.trials->trials) {
        for (const Vec2& s : t.osc[i]) {
          const Vec2 e = truth.f(s), f = vf.eval_uncoupled(i, s[0], s[1]);
          dt = std::max(dt, std::abs(e[0] - f[0]));
          dr = std::max(dr, std::abs(e[1] - f[1]));
        }
      }
      add("vf_deviation_theta" + tag, dt, 5e-2, true);
      add("vf_deviation_r" + tag, dr, 5e-2, true);
    }
  }

  if (config.model) {
    const auto& eps = config.model->eps;
    for (std::size_t i = 0; i < vf.n_osc; ++i) {
      for (std::size_t j = 0; j < vf.n_osc; ++j) {
        // i drives j: j listens to i and i hears nothing from j
        if (i == j || eps[i][j] != 0.0 || eps[j][i] == 0.0) continue;
        const std::string tag = "_" + std::to_string(i + 1) + "to" + std::to_string(j + 1);
        add("directionality_observable" + tag, pair_sup(vf, i, j) / pair_sup(vf, j, i), 0.1, true);
        if (a.coupling) {
          add("directionality_reduced" + tag, a.coupling->sup_norm(i, j) / a.coupling->sup_norm(j, i), 0.1, true);
          if (config.model->kind == ModelKind::VanDerPol) {
            add("rank1_energy" + tag, rank1_energy(*a.coupling, j, i), 0.8, false);
          }
          if (analytic) {
            const double e = eps[j][i];
            const auto gj = analytic_ground_truth(*config.model, j), gi = analytic_ground_truth(*config.model, i);
            const auto printed =
                scale_printed_terms(printed_reduced_coupling(*config.model, j, i), gj.amplitude_scale, gi.amplitude_scale);
            const PairBasisSpec& spec = a.coupling->spec;
            const PairCoupling& pc = a.coupling->at(j, i);
            const Eigen::VectorXd rp = pc.raw_phi(spec), rs = pc.raw_sigma(spec);
            const auto combos = spec.amplitude_combos();
            for (const PrintedTerm& t : printed) {
              if (t.n_i + t.n_j > 1 || std::abs(t.coef) < 0.1 * std::abs(e)) continue;
              const auto it = std::find(combos.begin(), combos.end(), std::make_pair(t.n_i, t.n_j));
              const int idx = pair_index(spec, static_cast<int>(it - combos.begin()), t.own, t.input);
              const double v = (t.phase ? rp : rs)[idx];
              const std::string name = std::string("reduced_coefficient_rel_error") + tag + "_" +
                                       (t.phase ? "phi" : "sigma") + "_s" + std::to_string(t.n_i) +
                                       std::to_string(t.n_j) + "_" + own_factor_label(t.own, "phi_i") + "*" +
                                       input_factor_label(t.input, "phi_j");
              add(name, std::abs(v - t.coef) / std::abs(t.coef), 0.15, true);
            }
          }
        }
      }
    }
  }
  return rep;
}

void save_config(const fs::path& dir, const PipelineConfig& config) {
  write_json_file(dir / files::kConfig, config_to_json(config));
}

PipelineConfig load_config(const fs::path& path) { return parse_config(read_json_file(path)); }

void save_vf(const fs::path& dir, const NetworkVF& vf, const std::vector<RadiusStats>& radii) {
  json r = json::array();
  for (const auto& s : radii) r.push_back({{"r_min", s.r_min}, {"r_max", s.r_max}});
  write_json_file(dir / files::kNetworkVf, make_document("pharec.network_vf/1", {{"vf", vf}, {"radii", r}}));
}

void load_vf(const fs::path& dir, Artifacts& a) {
  const json body = open_document(read_json_file(dir / files::kNetworkVf), "pharec.network_vf/1");
  a.vf = body.at("vf").get<NetworkVF>();
  a.radii.clear();
  for (const auto& s : body.at("radii")) a.radii.push_back({s.at("r_min").get<double>(), s.at("r_max").get<double>()});
}

void save_cycles(const fs::path& dir, const std::vector<CycleArtifact>& cycles) {
  json arr = json::array();
  for (const auto& c : cycles) arr.push_back({{"cycle", c.cycle}, {"lambda_log_slope", c.lambda_log_slope}});
  write_json_file(dir / files::kCycles, make_document("pharec.limit_cycles/1", {{"cycles", arr}}));
}

void load_cycles(const fs::path& dir, Artifacts& a) {
  const json body = open_document(read_json_file(dir / files::kCycles), "pharec.limit_cycles/1");
  a.cycles.clear();
  for (const auto& c : body.at("cycles")) {
    a.cycles.push_back({c.at("cycle").get<LimitCycle>(), c.at("lambda_log_slope").get<double>()});
  }
}

void save_transforms(const fs::path& dir, const std::vector<TransformSet>& transforms) {
  write_json_file(dir / files::kTransforms, make_document("pharec.transforms/1", {{"sets", transforms}}));
}

void load_transforms(const fs::path& dir, Artifacts& a) {
  const json body = open_document(read_json_file(dir / files::kTransforms), "pharec.transforms/1");
  a.transforms = body.at("sets").get<std::vector<TransformSet>>();
}

void save_coupling(const fs::path& dir, const ReducedCoupling& rc) {
  write_json_file(dir / files::kCoupling, make_document("pharec.reduced_coupling/1", rc));
  write_heatmaps(dir / files::kHeatmaps, rc);
}

void load_coupling(const fs::path& dir, Artifacts& a) {
  a.coupling = open_document(read_json_file(dir / files::kCoupling), "pharec.reduced_coupling/1").get<ReducedCoupling>();
}

void save_report(const fs::path& dir, const Report& report) { write_json_file(dir / files::kReport, report_json(report)); }

TrialSet obtain_trials(const PipelineConfig& config, const fs::path& out) {
  if (!config.trials_dir.empty()) return run_stage("load-trials", [&] { return read_trials(config.trials_dir); });
  TrialSet set = stage_simulate(config);
  if (!out.empty()) {
    json prov = {{"model", *config.model}, {"seed", config.trials.seed}, {"periods", config.trials.periods}};
    write_trials(out / files::kTrials, set, prov);
  }
  return set;
}

Artifacts run_pipeline(const PipelineConfig& config, const fs::path& out) {
  Artifacts a;
  if (!out.empty()) {
    fs::create_directories(out);
    save_config(out, config);
  }
  a.trials = obtain_trials(config, out);
  a.radii = radius_statistics(*a.trials, config.settle_fraction);
  a.vf = stage_reconstruct_vf(config, *a.trials);
  if (!out.empty()) save_vf(out, *a.vf, a.radii);
  a.cycles = stage_limit_cycle(config, *a.vf, a.radii);
  if (!out.empty()) save_cycles(out, a.cycles);
  a.transforms = stage_transforms(config, *a.vf, a.cycles);
  if (!out.empty()) save_transforms(out, a.transforms);
  a.coupling = stage_reduce_coupling(config, *a.vf, a.transforms, a.radii);
  if (!out.empty()) save_coupling(out, *a.coupling);
  return a;
}

}  // namespace pharec
