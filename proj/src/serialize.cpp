#include "pharec/serialize.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pharec/error.hpp"

namespace pharec {

namespace fs = std::filesystem;

namespace {

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd json_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json params_json(const OscillatorParams& p, ModelKind kind) {
  switch (kind) {
    case ModelKind::RadialIsochronClock:
      return {{"a", p.a}};
    case ModelKind::Canonical:
      return {{"a", p.a}, {"alpha", p.alpha}};
    case ModelKind::VanDerPol:
      return {{"mu", p.mu}};
    case ModelKind::WilsonCowan:
      return {{"a", p.a}, {"b", p.b}, {"c", p.c}, {"d", p.d}, {"rho_x", p.rho_x}, {"rho_y", p.rho_y}};
  }
  return json::object();
}

std::string mode_name(PairMode m) { return m == PairMode::Observable ? "observable" : "reduced"; }

PairMode mode_from(const std::string& s) {
  if (s == "observable") return PairMode::Observable;
  if (s == "reduced") return PairMode::Reduced;
  throw Error(ErrorCode::InvalidConfig, "unknown pair mode " + s);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || (*end != '\0' && *end != '\r')) {
    throw Error(ErrorCode::IoError, "bad number '" + s + "' in " + where);
  }
  return v;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void to_json(json& j, const ModelSpec& spec) {
  j = json::object();
  j["kind"] = to_string(spec.kind);
  json osc = json::array();
  for (const auto& p : spec.osc) osc.push_back(params_json(p, spec.kind));
  j["oscillators"] = osc;
  j["coupling"] = spec.eps;
}

void from_json(const json& j, ModelSpec& spec) {
  spec.kind = model_kind_from_string(j.at("kind").get<std::string>());
  spec.osc.clear();
  for (const auto& o : j.at("oscillators")) {
    OscillatorParams p;
    p.a = o.value("a", 0.0);
    p.alpha = o.value("alpha", 0.0);
    p.mu = o.value("mu", 0.0);
    p.b = o.value("b", 0.0);
    p.c = o.value("c", 0.0);
    p.d = o.value("d", 0.0);
    p.rho_x = o.value("rho_x", 0.0);
    p.rho_y = o.value("rho_y", 0.0);
    spec.osc.push_back(p);
  }
  spec.eps = j.at("coupling").get<std::vector<std::vector<double>>>();
}

void to_json(json& j, const SingleBasisSpec& spec) { j = json::array({spec.n_n, spec.n_k}); }

void from_json(const json& j, SingleBasisSpec& spec) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::InvalidConfig, "single orders need [n_n, n_k]");
  spec.n_n = j[0].get<int>();
  spec.n_k = j[1].get<int>();
}

void to_json(json& j, const PairBasisSpec& spec) {
  j = {{"orders", {spec.n_m, spec.n_ki, spec.n_kj}}, {"mode", mode_name(spec.mode)}};
}

void from_json(const json& j, PairBasisSpec& spec) {
  const json& o = j.is_array() ? j : j.at("orders");
  if (!o.is_array() || o.size() != 3) throw Error(ErrorCode::InvalidConfig, "pair orders need [n_m, n_ki, n_kj]");
  spec.n_m = o[0].get<int>();
  spec.n_ki = o[1].get<int>();
  spec.n_kj = o[2].get<int>();
  if (j.is_object() && j.contains("mode")) spec.mode = mode_from(j.at("mode").get<std::string>());
}

void to_json(json& j, const FittedSeries& s) {
  j = json::object();
  if (const auto* single = std::get_if<SingleBasisSpec>(&s.spec)) {
    j["basis"] = "single";
    j["orders"] = *single;
  } else {
    const auto& pair = std::get<PairBasisSpec>(s.spec);
    j["basis"] = "pair";
    j["orders"] = json::array({pair.n_m, pair.n_ki, pair.n_kj});
    j["mode"] = mode_name(pair.mode);
  }
  j["unit_i"] = s.unit_i;
  j["unit_j"] = s.unit_j;
  j["coeffs"] = vec_json(s.coeffs);
}

void from_json(const json& j, FittedSeries& s) {
  const std::string basis = j.at("basis").get<std::string>();
  if (basis == "single") {
    s.spec = j.at("orders").get<SingleBasisSpec>();
  } else if (basis == "pair") {
    PairBasisSpec p;
    from_json(j, p);
    s.spec = p;
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown basis " + basis);
  }
  s.unit_i = j.at("unit_i").get<double>();
  s.unit_j = j.at("unit_j").get<double>();
  s.coeffs = json_vec(j.at("coeffs"));
  if (s.coeffs.size() != s.basis_size()) throw Error(ErrorCode::ShapeMismatch, "coefficient count mismatch");
}

void to_json(json& j, const LimitCycle& c) {
  j = {{"period", c.period},
       {"omega", c.omega},
       {"n_g", c.n_g},
       {"gamma_coeffs", vec_json(c.gamma_coeffs)},
       {"lambda", c.lambda},
       {"monodromy", {c.monodromy(0, 0), c.monodromy(0, 1), c.monodromy(1, 0), c.monodromy(1, 1)}},
       {"r_section", c.r_section},
       {"profile_residual", c.profile_residual},
       {"step", c.step}};
}

void from_json(const json& j, LimitCycle& c) {
  c.period = j.at("period").get<double>();
  c.omega = j.at("omega").get<double>();
  c.n_g = j.at("n_g").get<int>();
  c.gamma_coeffs = json_vec(j.at("gamma_coeffs"));
  c.lambda = j.at("lambda").get<double>();
  const auto m = j.at("monodromy").get<std::vector<double>>();
  if (m.size() != 4) throw Error(ErrorCode::ShapeMismatch, "monodromy needs 4 entries");
  c.monodromy << m[0], m[1], m[2], m[3];
  c.r_section = j.at("r_section").get<double>();
  c.profile_residual = j.at("profile_residual").get<double>();
  c.step = j.at("step").get<double>();
}

void to_json(json& j, const TransformSet& t) {
  j = {{"inverse_phase", t.inverse_phase},
       {"inverse_amplitude", t.inverse_amplitude},
       {"forward_angle", t.forward_angle},
       {"forward_radius", t.forward_radius},
       {"domain",
        {{"r_lo", t.domain.r_lo},
         {"r_hi", t.domain.r_hi},
         {"scale_lo", t.domain.scale_lo},
         {"scale_hi", t.domain.scale_hi},
         {"sigma_lo", t.domain.sigma_lo},
         {"sigma_hi", t.domain.sigma_hi}}},
       {"gamma_coeffs", vec_json(t.gamma_coeffs)},
       {"n_g", t.n_g},
       {"omega", t.omega},
       {"lambda", t.lambda},
       {"kappa", {t.kappa[0], t.kappa[1], t.kappa[2], t.kappa[3]}}};
}

void from_json(const json& j, TransformSet& t) {
  t.inverse_phase = j.at("inverse_phase").get<FittedSeries>();
  t.inverse_amplitude = j.at("inverse_amplitude").get<FittedSeries>();
  t.forward_angle = j.at("forward_angle").get<FittedSeries>();
  t.forward_radius = j.at("forward_radius").get<FittedSeries>();
  const json& d = j.at("domain");
  t.domain.r_lo = d.at("r_lo").get<double>();
  t.domain.r_hi = d.at("r_hi").get<double>();
  t.domain.scale_lo = d.at("scale_lo").get<double>();
  t.domain.scale_hi = d.at("scale_hi").get<double>();
  t.domain.sigma_lo = d.at("sigma_lo").get<double>();
  t.domain.sigma_hi = d.at("sigma_hi").get<double>();
  t.gamma_coeffs = json_vec(j.at("gamma_coeffs"));
  t.n_g = j.at("n_g").get<int>();
  t.omega = j.at("omega").get<double>();
  t.lambda = j.at("lambda").get<double>();
  const auto k = j.at("kappa").get<std::vector<double>>();
  for (std::size_t q = 0; q < 4 && q < k.size(); ++q) t.kappa[q] = k[q];
}

void to_json(json& j, const NetworkVF& v) {
  j = json::object();
  j["n_osc"] = v.n_osc;
  j["single"] = v.single;
  j["pair"] = v.pair;
  j["units"] = v.units;
  json unc = json::array();
  for (const auto& u : v.uncoupled) unc.push_back({{"theta", u[0]}, {"r", u[1]}});
  j["uncoupled"] = unc;
  json cpl = json::array();
  for (std::size_t i = 0; i < v.n_osc; ++i) {
    for (std::size_t k = 0; k < v.n_osc; ++k) {
      if (i == k) continue;
      cpl.push_back({{"i", i}, {"j", k}, {"theta", v.coupling[i][k][0]}, {"r", v.coupling[i][k][1]}});
    }
  }
  j["coupling"] = cpl;
  json diag = json::array();
  for (const auto& d : v.diagnostics) {
    json pair = json::array();
    for (const auto& c : d) {
      pair.push_back({{"kappa", c.kappa},
                      {"gcv", c.gcv},
                      {"residual_norm", c.residual_norm},
                      {"effective_dof", c.effective_dof},
                      {"rows", c.rows}});
    }
    diag.push_back(pair);
  }
  j["diagnostics"] = diag;
}

void from_json(const json& j, NetworkVF& v) {
  v.n_osc = j.at("n_osc").get<std::size_t>();
  v.single = j.at("single").get<SingleBasisSpec>();
  from_json(j.at("pair"), v.pair);
  v.units = j.at("units").get<std::vector<double>>();
  v.uncoupled.clear();
  for (const auto& u : j.at("uncoupled")) {
    v.uncoupled.push_back({u.at("theta").get<FittedSeries>(), u.at("r").get<FittedSeries>()});
  }
  v.coupling.assign(v.n_osc, std::vector<std::array<FittedSeries, 2>>(v.n_osc));
  for (const auto& c : j.at("coupling")) {
    const auto i = c.at("i").get<std::size_t>(), k = c.at("j").get<std::size_t>();
    if (i >= v.n_osc || k >= v.n_osc) throw Error(ErrorCode::ShapeMismatch, "coupling index out of range");
    v.coupling[i][k] = {c.at("theta").get<FittedSeries>(), c.at("r").get<FittedSeries>()};
  }
  v.diagnostics.clear();
  for (const auto& d : j.at("diagnostics")) {
    std::array<FitDiagnostics, 2> pair;
    for (std::size_t c = 0; c < 2; ++c) {
      pair[c].kappa = d.at(c).at("kappa").get<double>();
      pair[c].gcv = d.at(c).at("gcv").get<double>();
      pair[c].residual_norm = d.at(c).at("residual_norm").get<double>();
      pair[c].effective_dof = d.at(c).at("effective_dof").get<double>();
      pair[c].rows = d.at(c).at("rows").get<long>();
    }
    v.diagnostics.push_back(pair);
  }
  if (v.uncoupled.size() != v.n_osc || v.units.size() != v.n_osc) {
    throw Error(ErrorCode::ShapeMismatch, "network VF arrays disagree with n_osc");
  }
}

void to_json(json& j, const ReducedCoupling& rc) {
  j = json::object();
  j["spec"] = rc.spec;
  j["omega"] = rc.omega;
  j["lambda"] = rc.lambda;
  json pairs = json::array();
  for (const auto& [key, pc] : rc.pairs) {
    pairs.push_back({{"i", key.first},
                     {"j", key.second},
                     {"p_phi", vec_json(pc.p_phi)},
                     {"p_sigma", vec_json(pc.p_sigma)},
                     {"unit_i", pc.unit_i},
                     {"unit_j", pc.unit_j},
                     {"kappa_phi", pc.kappa_phi},
                     {"kappa_sigma", pc.kappa_sigma},
                     {"samples", pc.samples},
                     {"fallback_range", pc.fallback_range}});
  }
  j["pairs"] = pairs;
}

void from_json(const json& j, ReducedCoupling& rc) {
  from_json(j.at("spec"), rc.spec);
  rc.omega = j.at("omega").get<std::vector<double>>();
  rc.lambda = j.at("lambda").get<std::vector<double>>();
  rc.pairs.clear();
  for (const auto& p : j.at("pairs")) {
    PairCoupling pc;
    pc.p_phi = json_vec(p.at("p_phi"));
    pc.p_sigma = json_vec(p.at("p_sigma"));
    if (pc.p_phi.size() != rc.spec.size() || pc.p_sigma.size() != rc.spec.size()) {
      throw Error(ErrorCode::ShapeMismatch, "reduced coupling coefficient count mismatch");
    }
    pc.unit_i = p.at("unit_i").get<double>();
    pc.unit_j = p.at("unit_j").get<double>();
    pc.kappa_phi = p.at("kappa_phi").get<double>();
    pc.kappa_sigma = p.at("kappa_sigma").get<double>();
    pc.samples = p.at("samples").get<long>();
    pc.fallback_range = p.at("fallback_range").get<bool>();
    rc.pairs.emplace(std::make_pair(p.at("i").get<std::size_t>(), p.at("j").get<std::size_t>()), std::move(pc));
  }
}

json make_document(const std::string& schema, json body) {
  json doc = json::object();
  doc["schema"] = schema;
  doc["data"] = std::move(body);
  return doc;
}

json open_document(const json& doc, const std::string& schema) {
  if (!doc.is_object() || !doc.contains("schema") || doc.at("schema") != schema) {
    throw Error(ErrorCode::InvalidConfig, "expected a document with schema " + schema);
  }
  return doc.at("data");
}

json read_json_file(const fs::path& path) {
  const std::string text = slurp(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void write_json_file(const fs::path& path, const json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

std::string trial_csv(const Trial& trial) {
  std::string out = "t";
  for (std::size_t i = 0; i < trial.osc.size(); ++i) {
    out += ",theta_" + std::to_string(i + 1) + ",r_" + std::to_string(i + 1);
  }
  out += '\n';
  for (std::size_t k = 0; k < trial.size(); ++k) {
    out += format_double(trial.times[k]);
    for (const auto& ch : trial.osc) {
      out += ',';
      out += format_double(ch[k][0]);
      out += ',';
      out += format_double(ch[k][1]);
    }
    out += '\n';
  }
  return out;
}

Trial parse_trial_csv(const std::string& text, std::size_t n_osc) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw Error(ErrorCode::IoError, "empty trial file");
  if (split(lines[0], ',').size() != 1 + 2 * n_osc) {
    throw Error(ErrorCode::IoError, "trial header does not match " + std::to_string(n_osc) + " oscillators");
  }
  Trial t;
  t.osc.assign(n_osc, {});
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto cells = split(lines[l], ',');
    if (cells.size() != 1 + 2 * n_osc) throw Error(ErrorCode::IoError, "row " + std::to_string(l) + " has wrong width");
    const std::string where = "trial row " + std::to_string(l);
    t.times.push_back(parse_double(cells[0], where));
    for (std::size_t i = 0; i < n_osc; ++i) {
      t.osc[i].emplace_back(parse_double(cells[1 + 2 * i], where), parse_double(cells[2 + 2 * i], where));
    }
  }
  return t;
}

void write_trials(const fs::path& dir, const TrialSet& trials, const json& provenance) {
  fs::create_directories(dir);
  json files = json::array();
  for (std::size_t k = 0; k < trials.trials.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "trial_%04zu.csv", k);
    write_text_file(dir / name, trial_csv(trials.trials[k]));
    files.push_back(name);
  }
  json body = provenance;
  body["n_osc"] = trials.n_osc;
  body["step"] = trials.step;
  body["count"] = trials.trials.size();
  body["provenance"] = trials.provenance;
  body["files"] = files;
  write_json_file(dir / "manifest.json", make_document("pharec.trials/1", body));
}

TrialSet read_trials(const fs::path& dir) {
  const json body = open_document(read_json_file(dir / "manifest.json"), "pharec.trials/1");
  TrialSet set;
  set.n_osc = body.at("n_osc").get<std::size_t>();
  set.step = body.at("step").get<double>();
  set.provenance = body.value("provenance", std::string("measured"));
  for (const auto& f : body.at("files")) {
    set.trials.push_back(parse_trial_csv(slurp(dir / f.get<std::string>()), set.n_osc));
  }
  if (set.trials.empty()) throw Error(ErrorCode::InvalidConfig, "trial manifest lists no files");
  return set;
}

void write_heatmaps(const fs::path& dir, const ReducedCoupling& rc) {
  fs::create_directories(dir);
  json panels = json::array();
  for (const auto& [key, pc] : rc.pairs) {
    (void)pc;
    for (const std::string eq : {"phi", "sigma"}) {
      const Heatmap map = heatmap_layout(rc, key.first, key.second, eq);
      for (const auto& panel : map.panels) {
        char name[96];
        std::snprintf(name, sizeof name, "pair_%zu_%zu_%s_s%d%d.csv", key.first + 1, key.second + 1, eq.c_str(),
                      panel.power_i, panel.power_j);
        std::string text = "own";
        for (const auto& c : panel.col_labels) text += "," + c;
        text += '\n';
        for (Eigen::Index r = 0; r < panel.cells.rows(); ++r) {
          text += panel.row_labels[r];
          for (Eigen::Index c = 0; c < panel.cells.cols(); ++c) text += "," + format_double(panel.cells(r, c));
          text += '\n';
        }
        write_text_file(dir / name, text);
        panels.push_back({{"file", name},
                          {"i", key.first + 1},
                          {"j", key.second + 1},
                          {"equation", eq},
                          {"sigma_i_power", panel.power_i},
                          {"sigma_j_power", panel.power_j},
                          {"rows", panel.row_labels},
                          {"columns", panel.col_labels}});
      }
    }
  }
  write_json_file(dir / "manifest.json", make_document("pharec.heatmaps/1", {{"panels", panels}}));
}

std::vector<RawSignal> read_raw_signals(const fs::path& path) {
  const auto lines = lines_of(slurp(path));
  if (lines.size() < 2) throw Error(ErrorCode::IoError, path.string() + " holds no samples");
  const auto header = split(lines[0], ',');
  if (header.size() < 2) throw Error(ErrorCode::IoError, "raw-signal CSV needs t and at least one channel");
  std::vector<RawSignal> out(header.size() - 1);
  for (std::size_t c = 0; c < out.size(); ++c) out[c].label = header[c + 1];
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto cells = split(lines[l], ',');
    if (cells.size() != header.size()) throw Error(ErrorCode::IoError, "row " + std::to_string(l) + " has wrong width");
    const std::string where = path.string() + " row " + std::to_string(l);
    const double t = parse_double(cells[0], where);
    for (std::size_t c = 0; c < out.size(); ++c) {
      out[c].times.push_back(t);
      out[c].values.push_back(parse_double(cells[c + 1], where));
    }
  }
  return out;
}

std::string extracted_csv(const std::vector<ExtractedChannel>& channels) {
  if (channels.empty()) return "t\n";
  std::string out = "t";
  for (const auto& c : channels) out += ",theta_" + c.label + ",r_" + c.label;
  out += ",edge\n";
  for (std::size_t k = 0; k < channels[0].times.size(); ++k) {
    out += format_double(channels[0].times[k]);
    for (const auto& c : channels) out += "," + format_double(c.theta[k]) + "," + format_double(c.r[k]);
    out += channels[0].edge[k] ? ",1\n" : ",0\n";
  }
  return out;
}

}  // namespace pharec
