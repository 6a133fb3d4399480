// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// when any criterion fails.
#include <sys/wait.h>

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pharec/averaging.hpp"
#include "pharec/coupling_reduction.hpp"
#include "pharec/limit_cycle.hpp"
#include "pharec/models.hpp"
#include "pharec/pipeline.hpp"
#include "pharec/ridge.hpp"
#include "pharec/transforms.hpp"
#include "pharec/trials.hpp"

using namespace pharec;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
const ModelKind kKinds[] = {ModelKind::RadialIsochronClock, ModelKind::Canonical, ModelKind::VanDerPol,
                            ModelKind::WilsonCowan};

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

void progress(const std::string& msg) {
  std::fprintf(stderr, "[acceptance] %s\n", msg.c_str());
  std::fflush(stderr);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double angle_gap(double a, double b) { return std::abs(std::remainder(a - b, 2.0 * kPi)); }

// Uncoupled oscillator of a benchmark model with its monodromy cycle.
struct Oscillator {
  PlanarSystem sys;
  LimitCycle cycle;
};

struct ModelCase {
  ModelKind kind;
  ModelSpec spec;
  std::vector<Oscillator> osc;
};

std::vector<ModelCase> model_cases() {
  std::vector<ModelCase> out;
  for (ModelKind kind : kKinds) {
    ModelCase mc{kind, default_model(kind), {}};
    const NetworkModel m(mc.spec);
    for (std::size_t i = 0; i < m.size(); ++i) mc.osc.push_back({m.uncoupled_polar(i), model_cycle(m, i)});
    out.push_back(std::move(mc));
  }
  return out;
}

// ---------------------------------------------------------------- criterion 1

Verdict floquet(const std::vector<ModelCase>& cases) {
  Verdict v;
  for (const ModelCase& mc : cases) {
    for (std::size_t i = 0; i < mc.osc.size(); ++i) {
      const Oscillator& o = mc.osc[i];
      const Averager avg(o.sys.f, o.cycle, o.cycle.lambda);
      const double slope = log_slope_lambda(avg, lambda_probe_points(o.cycle));
      const std::string tag = to_string(mc.kind) + "[" + std::to_string(i + 1) + "]";
      if (is_polar_native(mc.kind)) {
        const double exact = mc.kind == ModelKind::RadialIsochronClock ? -2.0 * mc.spec.osc[i].a
                                                                       : -2.0 * mc.spec.osc[i].alpha;
        const double em = std::abs(o.cycle.lambda - exact) / std::abs(exact);
        const double es = std::abs(slope - exact) / std::abs(exact);
        v.require(em < 1e-2, tag + fmt(" monodromy rel %.2e", em));
        v.require(es < 5e-3, tag + fmt(" log-slope rel %.2e", es));
      }
      const double agree = std::abs(slope - o.cycle.lambda) / std::abs(o.cycle.lambda);
      v.require(agree < 1e-2, tag + fmt(" routes rel %.2e", agree));
    }
  }
  return v;
}

// ------------------------------------------------------------ criteria 2 to 5

struct TransformCase {
  const ModelCase* mc;
  std::size_t i;
  TransformSet set;
};

std::vector<TransformCase> analytic_transforms(const std::vector<ModelCase>& cases) {
  std::vector<TransformCase> out;
  for (const ModelCase& mc : cases) {
    for (std::size_t i = 0; i < mc.osc.size(); ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      const Averager avg(mc.osc[i].sys.f, mc.osc[i].cycle, mc.osc[i].cycle.lambda);
      out.push_back({&mc, i, build_transforms(avg, default_transform_options(mc.kind)).set});
      progress("transforms " + to_string(mc.kind) + "[" + std::to_string(i + 1) + "] " +
               fmt("%.1f s", seconds_since(t0)));
    }
  }
  return out;
}

const TransformCase& find_case(const std::vector<TransformCase>& tc, ModelKind kind, std::size_t i) {
  for (const auto& c : tc) {
    if (c.mc->kind == kind && c.i == i) return c;
  }
  throw std::runtime_error("missing transform case");
}

Verdict inverse_amplitude(const std::vector<TransformCase>& tc) {
  Verdict v;
  {
    const TransformCase& c = find_case(tc, ModelKind::RadialIsochronClock, 0);
    double worst = 0.0;
    for (int p = 0; p < 64; ++p) {
      for (int q = 0; q <= 25; ++q) {
        const double th = 2.0 * kPi * p / 64.0, r = 0.8 + 0.5 * q / 25.0;
        worst = std::max(worst, std::abs(c.set.eval_inverse(th, r).sigma - (r * r - 1.0) / (2.0 * r * r)));
      }
    }
    v.require(c.mc->spec.osc[0].a == 1.0 && worst < 5e-3, fmt("clock a=1 max abs %.2e", worst));
  }
  {
    const TransformCase& c = find_case(tc, ModelKind::Canonical, 0);
    const double alpha = c.mc->spec.osc[0].alpha;
    std::vector<std::pair<double, double>> pts;
    for (int p = 0; p < 64; ++p) {
      for (int q = 0; q <= 25; ++q) {
        const double th = 2.0 * kPi * p / 64.0, r = 0.8 + 0.5 * q / 25.0;
        pts.push_back({c.set.eval_inverse(th, r).sigma, (1.0 - 1.0 / (r * r)) / (2.0 * alpha)});
      }
    }
    double num = 0.0, den = 0.0;
    for (auto [f, t] : pts) {
      num += f * t;
      den += t * t;
    }
    const double s = num / den;
    double err = 0.0, mag = 0.0;
    for (auto [f, t] : pts) {
      err = std::max(err, std::abs(f - s * t));
      mag = std::max(mag, std::abs(s * t));
    }
    v.require(s > 0.0 && err / mag < 2e-2, fmt("canonical scale %.4f rel %.2e", s, err / mag));
  }
  return v;
}

Verdict inverse_phase(const std::vector<TransformCase>& tc) {
  Verdict v;
  const TransformCase& clk = find_case(tc, ModelKind::RadialIsochronClock, 0);
  const TransformCase& can = find_case(tc, ModelKind::Canonical, 0);
  const double a = can.mc->spec.osc[0].a;
  double wc = 0.0, wk = 0.0;
  for (int p = 0; p < 64; ++p) {
    const double th = 2.0 * kPi * p / 64.0;
    for (int q = 0; q <= 25; ++q) {
      const double r1 = 0.8 + 0.5 * q / 25.0, r2 = 0.8 + 0.45 * q / 25.0;
      wc = std::max(wc, angle_gap(clk.set.eval_inverse(th, r1).phi, th));
      wk = std::max(wk, angle_gap(can.set.eval_inverse(th, r2).phi, th + a * std::log(r2)));
    }
  }
  v.require(wc < 5e-3, fmt("clock max %.2e", wc));
  v.require(wk < 1e-2, fmt("canonical max %.2e", wk));
  return v;
}

Verdict invariance(const std::vector<TransformCase>& tc) {
  Verdict v;
  for (const TransformCase& c : tc) {
    const LimitCycle& cyc = c.mc->osc[c.i].cycle;
    const auto grid = interior_grid(c.set);
    const InvarianceResidual r = invariance_residual(c.set, c.mc->osc[c.i].sys.f, grid, cyc.omega, cyc.lambda);
    const double ep = r.phase_rms / cyc.omega;
    const double ea = r.amplitude_rms / (std::abs(cyc.lambda) * r.sigma_max);
    const std::string tag = to_string(c.mc->kind) + "[" + std::to_string(c.i + 1) + "]";
    v.require(ep < 1e-2 && ea < 1e-2, tag + fmt(" phase %.1e amp %.1e", ep, ea));
  }
  return v;
}

Verdict composition(const std::vector<TransformCase>& tc) {
  Verdict v;
  for (const TransformCase& c : tc) {
    const double e = composition_error(c.set, interior_grid(c.set));
    v.require(e < 1e-2, to_string(c.mc->kind) + "[" + std::to_string(c.i + 1) + "]" + fmt(" %.1e", e));
  }
  return v;
}

// ------------------------------------------------------------- criterion 10

Eigen::MatrixXd gaussian(int n, int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) a(i, j) = g(rng);
  }
  return a;
}

Verdict ridge_properties() {
  Verdict v;
  std::mt19937_64 rng(2024);
  double ols = 0.0;
  bool monotone = true;
  for (int p = 0; p < 100; ++p) {
    const int n = 20 + p % 31, m = 2 + p % 12;
    const Eigen::MatrixXd a = gaussian(n, m, rng);
    const Eigen::VectorXd y = gaussian(n, 1, rng);
    const SvdContext ctx = make_svd_context(a, y);
    const Eigen::VectorXd q0 = ridge_solve(ctx, 0, KappaPolicy::fixed(0.0)).q;
    const Eigen::VectorXd oracle = a.colPivHouseholderQr().solve(y);
    ols = std::max(ols, (q0 - oracle).norm() / oracle.norm());
    double prev = q0.norm();
    for (double k = 1e-6; k < 1e6; k *= 2.0) {
      const double now = ridge_solve(ctx, 0, KappaPolicy::fixed(k)).q.norm();
      monotone = monotone && now <= prev;
      prev = now;
    }
  }
  double spread = 0.0;
  for (int p = 0; p < 10; ++p) {
    const int n = 5 + p;
    const Eigen::VectorXd y = gaussian(n, 1, rng);
    const SvdContext ctx = make_svd_context(Eigen::MatrixXd::Identity(n, n), y);
    const double expect = y.squaredNorm() / (static_cast<double>(n) * n);
    for (double k : {1e-8, 1e-3, 1.0, 10.0, 1e4}) spread = std::max(spread, std::abs(gcv_score(ctx, 0, k) - expect));
  }
  v.require(ols < 1e-10, fmt("kappa=0 vs OLS rel %.1e", ols));
  v.require(monotone, "monotone shrinkage on 100 problems");
  v.require(spread < 1e-10, fmt("identity GCV spread %.1e", spread));
  return v;
}

// ------------------------------------------------------------- criterion 11

Verdict equivariance(const std::vector<ModelCase>& cases) {
  Verdict v;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi), scale(0.85, 1.2);
  for (const ModelCase& mc : cases) {
    double wp = 0.0, ws = 0.0;
    for (std::size_t i = 0; i < mc.osc.size(); ++i) {
      const Oscillator& o = mc.osc[i];
      const Averager avg(o.sys.f, o.cycle, o.cycle.lambda);
      const double t = 0.3 * o.cycle.period;
      for (int k = 0; k < 5; ++k) {
        const double th = angle(rng);
        const Vec2 ic(th, scale(rng) * o.cycle.gamma(th));
        const ReducedSample a = avg.reduce(ic[0], ic[1]);
        const Vec2 moved = integrate(o.sys.f, ic, t, o.cycle.step).states.back();
        const ReducedSample b = avg.reduce(moved[0], moved[1]);
        wp = std::max(wp, angle_gap(b.phi0, a.phi0 + o.cycle.omega * t));
        ws = std::max(ws, std::abs(b.sigma0 - a.sigma0 * std::exp(o.cycle.lambda * t)));
      }
    }
    v.require(wp < 1e-3 && ws < 1e-3, to_string(mc.kind) + fmt(" dphi %.1e dsigma %.1e", wp, ws));
  }
  return v;
}

// --------------------------------------------------------- criteria 6 to 9, 12

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PHAREC_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    out[fs::relative(e.path(), root).string()] =
        std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return out;
}

struct PipelineRun {
  ModelKind kind;
  ModelSpec spec;
  Artifacts art;
  double seconds = 0.0;
  bool completed = false;
  bool identical = false;
  std::string mismatch;
};

std::vector<PipelineRun> run_pipelines(const fs::path& root) {
  std::vector<PipelineRun> out;
  for (ModelKind kind : kKinds) {
    PipelineRun run{kind, default_model(kind), {}, 0.0, false, false, {}};
    const fs::path a = root / (to_string(kind) + "_a"), b = root / (to_string(kind) + "_b");
    const fs::path cfg = root / (to_string(kind) + ".json");
    write_json_file(cfg, config_to_json(default_config(kind)));
    const auto t0 = std::chrono::steady_clock::now();
    const int ca = run_cli("pipeline --config " + cfg.string() + " --out " + a.string());
    run.seconds = seconds_since(t0);
    const int cb = run_cli("pipeline --config " + cfg.string() + " --out " + b.string());
    progress("pipeline " + to_string(kind) + fmt(" %.1f s, exit codes %.0f", run.seconds, ca) +
             fmt("/%.0f", cb));
    run.completed = (ca == 0 || ca == 1) && (cb == 0 || cb == 1);
    if (run.completed) {
      const auto ta = tree_bytes(a), tb = tree_bytes(b);
      run.identical = ta == tb && !ta.empty();
      for (const auto& [name, bytes] : ta) {
        const auto it = tb.find(name);
        if (it == tb.end() || it->second != bytes) {
          run.mismatch = name;
          break;
        }
      }
      run.art.trials = read_trials(a / files::kTrials);
      load_vf(a, run.art);
      load_cycles(a, run.art);
      load_transforms(a, run.art);
      load_coupling(a, run.art);
    }
    out.push_back(std::move(run));
  }
  return out;
}

Verdict vf_reconstruction(const std::vector<PipelineRun>& runs) {
  Verdict v;
  for (const PipelineRun& run : runs) {
    if (!run.completed) {
      v.require(false, to_string(run.kind) + " pipeline did not complete");
      continue;
    }
    const NetworkModel m(run.spec);
    const NetworkVF& vf = *run.art.vf;
    double dt = 0.0, dr = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const PlanarSystem truth = m.uncoupled_polar(i);
      for (const Trial& t : run.art.trials->trials) {
        for (const Vec2& s : t.osc[i]) {
          const Vec2 e = truth.f(s), f = vf.eval_uncoupled(i, s[0], s[1]);
          dt = std::max(dt, std::abs(e[0] - f[0]));
          dr = std::max(dr, std::abs(e[1] - f[1]));
        }
      }
    }
    v.require(dt < 5e-2 && dr < 5e-2, to_string(run.kind) + fmt(" dev theta %.1e r %.1e", dt, dr));
    if (run.kind == ModelKind::RadialIsochronClock) {
      for (std::size_t i = 0; i < m.size(); ++i) {
        const double a = run.spec.osc[i].a, u = vf.units[i];
        const Eigen::VectorXd& q = vf.uncoupled[i][1].coeffs;
        const double c1 = q[single_index(vf.single, {1, 0, false})] / u;
        const double c3 = q[single_index(vf.single, {3, 0, false})] / (u * u * u);
        const double e1 = std::abs(c1 - a) / a, e3 = std::abs(c3 + a) / a;
        v.require(e1 < 2e-2 && e3 < 2e-2, "clock[" + std::to_string(i + 1) + fmt("] r-coef rel %.1e %.1e", e1, e3));
      }
    }
  }
  return v;
}

Verdict directionality(const std::vector<PipelineRun>& runs) {
  Verdict v;
  for (const PipelineRun& run : runs) {
    if (!run.completed) {
      v.require(false, to_string(run.kind) + " pipeline did not complete");
      continue;
    }
    const double obs = run.art.vf->coupling_sup_norm(0) / run.art.vf->coupling_sup_norm(1);
    const double red = run.art.coupling->sup_norm(0, 1) / run.art.coupling->sup_norm(1, 0);
    v.require(obs <= 0.1 && red <= 0.1, to_string(run.kind) + fmt(" observable %.1e reduced %.1e", obs, red));
  }
  return v;
}

int index_of(const PairBasisSpec& spec, int ni, int nj, int own, int input) {
  const auto combos = spec.amplitude_combos();
  const auto it = std::find(combos.begin(), combos.end(), std::make_pair(ni, nj));
  return pair_index(spec, static_cast<int>(it - combos.begin()), own, input);
}

// Worst relative error over printed coefficients of σ-order <= 1 and
// magnitude >= 0.1 ε.
double printed_error(const std::vector<PrintedTerm>& printed, const PairBasisSpec& spec, const Eigen::VectorXd& phi,
                     const Eigen::VectorXd& sigma, double eps) {
  double worst = 0.0;
  for (const PrintedTerm& t : printed) {
    if (t.n_i + t.n_j > 1 || std::abs(t.coef) < 0.1 * std::abs(eps)) continue;
    const double got = (t.phase ? phi : sigma)[index_of(spec, t.n_i, t.n_j, t.own, t.input)];
    worst = std::max(worst, std::abs(got - t.coef) / std::abs(t.coef));
  }
  return worst;
}

Verdict reduced_structure(const std::vector<PipelineRun>& runs) {
  Verdict v;
  constexpr int kCos = 1, kSin = 1;  // own cos φ_i, input sin φ_j
  for (const PipelineRun& run : runs) {
    if (!is_polar_native(run.kind)) continue;
    if (!run.completed) {
      v.require(false, to_string(run.kind) + " pipeline did not complete");
      continue;
    }
    const ReducedCoupling& rc = *run.art.coupling;
    const PairBasisSpec& spec = rc.spec;
    const double eps = run.spec.eps[1][0];
    const PairCoupling& pc = rc.at(1, 0);
    const Eigen::VectorXd phi = pc.raw_phi(spec), sig = pc.raw_sigma(spec);
    const auto g1 = analytic_ground_truth(run.spec, 1), g0 = analytic_ground_truth(run.spec, 0);
    const std::string tag = to_string(run.kind);

    if (run.kind == ModelKind::RadialIsochronClock) {
      const double lead = phi[index_of(spec, 0, 0, kCos, kSin)];
      const double ei = phi[index_of(spec, 1, 0, kCos, kSin)], ej = phi[index_of(spec, 0, 1, kCos, kSin)];
      v.require(std::abs(lead - eps) < 0.1 * eps, fmt("clock lead %.4f vs eps %.2f", lead, eps));
      v.require(ei < 0.0 && ej > 0.0, fmt("clock sign sigma_i %.3f sigma_j %.3f", ei, ej));
    }

    // Oracle route: analytic transforms and exact coupling on the settled radius ranges.
    const NetworkModel m(run.spec);
    const RadiusRange ri = evaluation_radius_range(run.art.radii[1].r_min, run.art.radii[1].r_max);
    const RadiusRange rj = evaluation_radius_range(run.art.radii[0].r_min, run.art.radii[0].r_max);
    const InverseMap inv_i = [g1](double th, double r) { return g1.inverse(th, r); };
    const InverseMap inv_j = [g0](double th, double r) { return g0.inverse(th, r); };
    const CouplingField field = [&m](const GridPoint& p) {
      return m.coupling_polar(1, 0, Vec2(p.theta_i, p.r_i), Vec2(p.theta_j, p.r_j));
    };
    const ReductionOptions ro;
    const auto samples = reduced_coupling_samples(field, inv_i, inv_j, sample_evaluation_grid(ri, rj, ro.points, ro.seed));
    const PairCoupling oracle = fit_reduced_coupling(samples, ro.spec);
    const double eo = printed_error(printed_reduced_coupling(run.spec, 1, 0), ro.spec, oracle.raw_phi(ro.spec),
                                    oracle.raw_sigma(ro.spec), eps);
    v.require(eo < 5e-2, tag + fmt(" oracle worst %.2e", eo));

    const auto scaled = scale_printed_terms(printed_reduced_coupling(run.spec, 1, 0), g1.amplitude_scale, g0.amplitude_scale);
    const double ep = printed_error(scaled, spec, phi, sig, eps);
    v.require(ep < 0.15, tag + fmt(" pipeline worst %.2e", ep));
  }
  return v;
}

Verdict factorization(const std::vector<PipelineRun>& runs) {
  Verdict v;
  for (const PipelineRun& run : runs) {
    if (run.kind != ModelKind::VanDerPol) continue;
    if (!run.completed) {
      v.require(false, "van_der_pol pipeline did not complete");
      continue;
    }
    const ReducedCoupling& rc = *run.art.coupling;
    const PairBasisSpec& spec = rc.spec;
    const PairCoupling& pc = rc.at(1, 0);
    const int np = spec.n_m + 1, no = spec.own_count(), nq = spec.input_count();
    Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(np * no, np * nq);
    for (int t = 0; t < spec.size(); ++t) {
      const PairTerm term = pair_term(spec, t);
      mat(term.power_i * no + term.own, term.power_j * nq + term.input) = pc.p_phi[t];
    }
    const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(mat).singularValues();
    const double energy = s[0] * s[0] / s.squaredNorm();
    v.require(energy >= 0.8, fmt("top singular energy %.4f", energy));
  }
  return v;
}

Verdict determinism(const std::vector<PipelineRun>& runs) {
  Verdict v;
  double total = 0.0;
  for (const PipelineRun& run : runs) {
    total += run.seconds;
    v.require(run.completed && run.identical,
              to_string(run.kind) + (run.identical ? " identical" : " differs at " + run.mismatch));
  }
  v.require(total < 1800.0, fmt("four-model pipeline %.0f s", total));
  return v;
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path root = fs::temp_directory_path() / "pharec_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);

  std::map<int, std::pair<std::string, Verdict>> results;
  auto record = [&](int id, const std::string& title, auto&& fn) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    results[id] = {title, v};
    progress(fmt("criterion %.0f done", id) + fmt(" at %.0f s", seconds_since(t0)));
  };

  record(10, "ridge/GCV properties", [] { return ridge_properties(); });
  std::vector<ModelCase> cases;
  record(1, "Floquet exponents", [&] {
    cases = model_cases();
    return floquet(cases);
  });
  record(11, "averaging flow-equivariance", [&] { return equivariance(cases); });
  std::vector<TransformCase> tc;
  try {
    tc = analytic_transforms(cases);
  } catch (const std::exception& e) {
    progress(std::string("transforms failed: ") + e.what());
  }
  record(2, "inverse amplitude transform", [&] { return inverse_amplitude(tc); });
  record(3, "inverse phase transform", [&] { return inverse_phase(tc); });
  record(4, "invariance-equation residuals", [&] { return invariance(tc); });
  record(5, "composition identity", [&] { return composition(tc); });

  std::vector<PipelineRun> runs;
  try {
    runs = run_pipelines(root);
  } catch (const std::exception& e) {
    progress(std::string("pipelines failed: ") + e.what());
  }
  record(6, "vector-field reconstruction", [&] { return vf_reconstruction(runs); });
  record(7, "directionality", [&] { return directionality(runs); });
  record(8, "reduced coupling structure", [&] { return reduced_structure(runs); });
  record(9, "van der Pol factorization", [&] { return factorization(runs); });
  record(12, "end-to-end determinism", [&] { return determinism(runs); });

  bool all = true;
  for (int id = 1; id <= 12; ++id) {
    const auto it = results.find(id);
    const bool pass = it != results.end() && it->second.second.pass && !it->second.second.detail.empty();
    all = all && pass;
    std::printf("%s criterion %2d %s: %s\n", pass ? "PASS" : "FAIL", id,
                it == results.end() ? "not run" : it->second.first.c_str(),
                it == results.end() ? "" : it->second.second.detail.c_str());
  }
  std::fflush(stdout);
  fs::remove_all(root);
  return all ? 0 : 1;
}
