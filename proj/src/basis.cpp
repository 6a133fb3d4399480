#include "pharec/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pharec/error.hpp"

namespace pharec {

namespace {

struct Harmonics {
  double c[kMaxStackHarmonics + 1];
  double s[kMaxStackHarmonics + 1];
  Harmonics(double angle, int kmax) {
    if (kmax > kMaxStackHarmonics) {
      throw Error(ErrorCode::ShapeMismatch, "harmonic order exceeds limit");
    }
    harmonics(angle, kmax, c, s);
  }
};

void check_single(const SingleBasisSpec& spec) {
  if (spec.n_n < 0 || spec.n_k < 0) throw Error(ErrorCode::ShapeMismatch, "negative basis order");
}

void check_pair(const PairBasisSpec& spec) {
  if (spec.n_m < 0 || spec.n_ki < 0 || spec.n_kj < 1) {
    throw Error(ErrorCode::ShapeMismatch, "pair basis needs n_m >= 0, n_ki >= 0, n_kj >= 1");
  }
}

}  // namespace

void harmonics(double angle, int kmax, double* c, double* s) {
  const double a = std::remainder(angle, 2.0 * std::numbers::pi);
  c[0] = 1.0;
  s[0] = 0.0;
  if (kmax < 1) return;
  const double c1 = std::cos(a);
  const double s1 = std::sin(a);
  c[1] = c1;
  s[1] = s1;
  for (int k = 2; k <= kmax; ++k) {
    c[k] = c[k - 1] * c1 - s[k - 1] * s1;
    s[k] = s[k - 1] * c1 + c[k - 1] * s1;
  }
}

SingleTerm single_term(const SingleBasisSpec& spec, int index) {
  const int width = 2 * spec.n_k + 1;
  if (index < 0 || index >= spec.size()) throw Error(ErrorCode::ShapeMismatch, "term index out of range");
  SingleTerm t;
  t.n = index / width;
  const int rest = index % width;
  if (rest == 0) return t;
  t.k = (rest + 1) / 2;
  t.is_sin = (rest % 2) == 0;
  return t;
}

int single_index(const SingleBasisSpec& spec, const SingleTerm& term) {
  const int width = 2 * spec.n_k + 1;
  if (term.n < 0 || term.n > spec.n_n || term.k < 0 || term.k > spec.n_k || (term.k == 0 && term.is_sin)) {
    throw Error(ErrorCode::ShapeMismatch, "term outside basis");
  }
  const int rest = term.k == 0 ? 0 : 2 * term.k - 1 + (term.is_sin ? 1 : 0);
  return term.n * width + rest;
}

std::vector<std::pair<int, int>> PairBasisSpec::amplitude_combos() const {
  std::vector<std::pair<int, int>> combos;
  for (int mi = 0; mi <= n_m; ++mi) {
    const int top = mode == PairMode::Observable ? n_m - mi : n_m;
    for (int mj = 0; mj <= top; ++mj) combos.emplace_back(mi, mj);
  }
  return combos;
}

int PairBasisSpec::size() const {
  return static_cast<int>(amplitude_combos().size()) * own_count() * input_count();
}

PairTerm pair_term(const PairBasisSpec& spec, int index) {
  if (index < 0 || index >= spec.size()) throw Error(ErrorCode::ShapeMismatch, "term index out of range");
  const int block = spec.own_count() * spec.input_count();
  const auto combos = spec.amplitude_combos();
  PairTerm t;
  t.combo = index / block;
  t.power_i = combos[t.combo].first;
  t.power_j = combos[t.combo].second;
  const int rest = index % block;
  t.own = rest / spec.input_count();
  t.input = rest % spec.input_count();
  return t;
}

int pair_index(const PairBasisSpec& spec, int combo, int own, int input) {
  const int ncombo = static_cast<int>(spec.amplitude_combos().size());
  if (combo < 0 || combo >= ncombo || own < 0 || own >= spec.own_count() || input < 0 ||
      input >= spec.input_count()) {
    throw Error(ErrorCode::ShapeMismatch, "pair term outside basis");
  }
  return (combo * spec.own_count() + own) * spec.input_count() + input;
}

std::string own_factor_label(int own, const std::string& angle) {
  if (own == 0) return "1";
  const int k = (own + 1) / 2;
  const std::string arg = k == 1 ? angle : std::to_string(k) + angle;
  return (own % 2 == 1 ? "cos(" : "sin(") + arg + ")";
}

std::string input_factor_label(int input, const std::string& angle) {
  const int k = input / 2 + 1;
  const std::string arg = k == 1 ? angle : std::to_string(k) + angle;
  return (input % 2 == 0 ? "cos(" : "sin(") + arg + ")";
}

void single_row(const SingleBasisSpec& spec, double angle, double radius, double* out) {
  check_single(spec);
  const Harmonics h(angle, spec.n_k);
  double rn = 1.0;
  int idx = 0;
  for (int n = 0; n <= spec.n_n; ++n) {
    out[idx++] = rn;
    for (int k = 1; k <= spec.n_k; ++k) {
      out[idx++] = rn * h.c[k];
      out[idx++] = rn * h.s[k];
    }
    rn *= radius;
  }
}

Eigen::RowVectorXd single_row(const SingleBasisSpec& spec, double angle, double radius) {
  Eigen::RowVectorXd row(spec.size());
  single_row(spec, angle, radius, row.data());
  return row;
}

void pair_row(const PairBasisSpec& spec, double theta_i, double amp_i, double theta_j,
              double amp_j, double* out) {
  check_pair(spec);
  const Harmonics hi(theta_i, spec.n_ki);
  const Harmonics hj(theta_j, spec.n_kj);
  const int no = spec.own_count();
  const int ni = spec.input_count();
  double own[2 * kMaxStackHarmonics + 1];
  double input[2 * kMaxStackHarmonics];
  own[0] = 1.0;
  for (int k = 1; k <= spec.n_ki; ++k) {
    own[2 * k - 1] = hi.c[k];
    own[2 * k] = hi.s[k];
  }
  for (int k = 1; k <= spec.n_kj; ++k) {
    input[2 * (k - 1)] = hj.c[k];
    input[2 * k - 1] = hj.s[k];
  }
  int idx = 0;
  for (const auto& [pi, pj] : spec.amplitude_combos()) {
    const double amp = std::pow(amp_i, pi) * std::pow(amp_j, pj);
    for (int o = 0; o < no; ++o) {
      const double a = amp * own[o];
      for (int q = 0; q < ni; ++q) out[idx++] = a * input[q];
    }
  }
}

Eigen::RowVectorXd pair_row(const PairBasisSpec& spec, double theta_i, double amp_i,
                            double theta_j, double amp_j) {
  Eigen::RowVectorXd row(spec.size());
  pair_row(spec, theta_i, amp_i, theta_j, amp_j, row.data());
  return row;
}

SingleGrad single_eval_grad(const SingleBasisSpec& spec, const Eigen::VectorXd& q, double angle,
                            double radius) {
  check_single(spec);
  if (q.size() != spec.size()) throw Error(ErrorCode::ShapeMismatch, "coefficient length mismatch");
  const Harmonics h(angle, spec.n_k);
  SingleGrad g;
  double rn = 1.0;     // r^n
  double drn = 0.0;    // n r^(n-1)
  double rprev = 1.0;  // r^(n-1)
  int idx = 0;
  for (int n = 0; n <= spec.n_n; ++n) {
    double trig = q[idx];
    double dtrig = 0.0;
    ++idx;
    for (int k = 1; k <= spec.n_k; ++k) {
      const double qc = q[idx++];
      const double qs = q[idx++];
      trig += qc * h.c[k] + qs * h.s[k];
      dtrig += k * (qs * h.c[k] - qc * h.s[k]);
    }
    g.value += rn * trig;
    g.d_angle += rn * dtrig;
    g.d_radius += drn * trig;
    rprev = rn;
    rn *= radius;
    drn = static_cast<double>(n + 1) * rprev;
  }
  return g;
}

double single_eval(const SingleBasisSpec& spec, const Eigen::VectorXd& q, double angle,
                   double radius) {
  return single_eval_grad(spec, q, angle, radius).value;
}

PairGrad pair_eval_grad(const PairBasisSpec& spec, const Eigen::VectorXd& q, double theta_i,
                        double amp_i, double theta_j, double amp_j) {
  check_pair(spec);
  if (q.size() != spec.size()) throw Error(ErrorCode::ShapeMismatch, "coefficient length mismatch");
  const Harmonics hi(theta_i, spec.n_ki);
  const Harmonics hj(theta_j, spec.n_kj);
  const int no = spec.own_count();
  const int ni = spec.input_count();
  double own[2 * kMaxStackHarmonics + 1], down[2 * kMaxStackHarmonics + 1];
  double input[2 * kMaxStackHarmonics], dinput[2 * kMaxStackHarmonics];
  own[0] = 1.0;
  down[0] = 0.0;
  for (int k = 1; k <= spec.n_ki; ++k) {
    own[2 * k - 1] = hi.c[k];
    own[2 * k] = hi.s[k];
    down[2 * k - 1] = -k * hi.s[k];
    down[2 * k] = k * hi.c[k];
  }
  for (int k = 1; k <= spec.n_kj; ++k) {
    input[2 * (k - 1)] = hj.c[k];
    input[2 * k - 1] = hj.s[k];
    dinput[2 * (k - 1)] = -k * hj.s[k];
    dinput[2 * k - 1] = k * hj.c[k];
  }
  PairGrad g;
  int idx = 0;
  for (const auto& [pi, pj] : spec.amplitude_combos()) {
    const double ai = std::pow(amp_i, pi);
    const double aj = std::pow(amp_j, pj);
    const double dai = pi == 0 ? 0.0 : pi * std::pow(amp_i, pi - 1);
    const double daj = pj == 0 ? 0.0 : pj * std::pow(amp_j, pj - 1);
    // Bilinear sums over the coefficient block of this combination.
    double s = 0.0, s_di = 0.0, s_dj = 0.0;
    for (int o = 0; o < no; ++o) {
      double row = 0.0, drow = 0.0;
      for (int c = 0; c < ni; ++c) {
        const double coef = q[idx++];
        row += coef * input[c];
        drow += coef * dinput[c];
      }
      s += own[o] * row;
      s_di += down[o] * row;
      s_dj += own[o] * drow;
    }
    g.value += ai * aj * s;
    g.d_theta_i += ai * aj * s_di;
    g.d_theta_j += ai * aj * s_dj;
    g.d_amp_i += dai * aj * s;
    g.d_amp_j += ai * daj * s;
  }
  return g;
}

double pair_eval(const PairBasisSpec& spec, const Eigen::VectorXd& q, double theta_i,
                 double amp_i, double theta_j, double amp_j) {
  return pair_eval_grad(spec, q, theta_i, amp_i, theta_j, amp_j).value;
}

int FittedSeries::arity() const { return std::holds_alternative<SingleBasisSpec>(spec) ? 2 : 4; }

int FittedSeries::basis_size() const {
  return std::visit([](const auto& s) { return s.size(); }, spec);
}

SeriesValue FittedSeries::eval_grad(const std::vector<double>& point) const {
  if (static_cast<int>(point.size()) != arity()) {
    throw Error(ErrorCode::ArityMismatch, "series expects " + std::to_string(arity()) +
                                              " coordinates, got " + std::to_string(point.size()));
  }
  SeriesValue out;
  if (const auto* s = std::get_if<SingleBasisSpec>(&spec)) {
    const SingleGrad g = single_eval_grad(*s, coeffs, point[0], point[1] / unit_i);
    out.value = g.value;
    out.grad = {g.d_angle, g.d_radius / unit_i};
  } else {
    const auto& p = std::get<PairBasisSpec>(spec);
    const PairGrad g =
        pair_eval_grad(p, coeffs, point[0], point[1] / unit_i, point[2], point[3] / unit_j);
    out.value = g.value;
    out.grad = {g.d_theta_i, g.d_amp_i / unit_i, g.d_theta_j, g.d_amp_j / unit_j};
  }
  return out;
}

double amplitude_unit(std::vector<double> amplitudes) {
  std::erase_if(amplitudes, [](double a) { return !(a > 0.0) || !std::isfinite(a); });
  if (amplitudes.empty()) return 1.0;
  const auto mid = amplitudes.begin() + static_cast<std::ptrdiff_t>(amplitudes.size() / 2);
  std::nth_element(amplitudes.begin(), mid, amplitudes.end());
  return std::exp2(std::round(std::log2(*mid)));
}

}  // namespace pharec
