#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "pharec/basis.hpp"
#include "pharec/error.hpp"

using namespace pharec;

namespace {

constexpr double kPi = std::numbers::pi;

double single_factor(const SingleTerm& t, double th, double r) {
  const double ang = t.k == 0 ? 1.0 : t.is_sin ? std::sin(t.k * th) : std::cos(t.k * th);
  return std::pow(r, t.n) * ang;
}

double own_factor(int own, double th) {
  if (own == 0) return 1.0;
  const int k = (own + 1) / 2;
  return own % 2 ? std::cos(k * th) : std::sin(k * th);
}

double input_factor(int input, double th) {
  const int k = input / 2 + 1;
  return input % 2 ? std::sin(k * th) : std::cos(k * th);
}

}  // namespace

TEST_CASE("basis sizes") {
  CHECK(SingleBasisSpec{4, 5}.size() == 55);
  CHECK(SingleBasisSpec{0, 0}.size() == 1);
  const PairBasisSpec obs{2, 2, 2, PairMode::Observable};
  CHECK(obs.amplitude_combos().size() == 6);
  CHECK(obs.size() == 6 * 5 * 4);
  const PairBasisSpec red{2, 2, 2, PairMode::Reduced};
  CHECK(red.amplitude_combos().size() == 9);
  CHECK(red.size() == 9 * 5 * 4);
  CHECK(PairBasisSpec{3, 2, 2, PairMode::Reduced}.size() == 320);
}

TEST_CASE("single rows match the closed-form layout") {
  const SingleBasisSpec spec{3, 4};
  const double th = 1.234, r = 0.87;
  const Eigen::RowVectorXd row = single_row(spec, th, r);
  REQUIRE(row.size() == spec.size());
  for (int idx = 0; idx < spec.size(); ++idx) {
    const SingleTerm t = single_term(spec, idx);
    CHECK(single_index(spec, t) == idx);
    CHECK(std::abs(row[idx] - single_factor(t, th, r)) < 1e-13);
  }
  CHECK(row[0] == 1.0);
  CHECK(single_term(spec, 1) == SingleTerm{0, 1, false});
  CHECK(single_term(spec, 2) == SingleTerm{0, 1, true});
}

TEST_CASE("pair rows match the closed-form layout") {
  for (PairMode mode : {PairMode::Observable, PairMode::Reduced}) {
    const PairBasisSpec spec{2, 3, 2, mode};
    const double ti = 0.4, ai = -0.3, tj = 2.2, aj = 0.6;
    const Eigen::RowVectorXd row = pair_row(spec, ti, ai, tj, aj);
    const auto combos = spec.amplitude_combos();
    std::set<std::pair<int, int>> unique(combos.begin(), combos.end());
    CHECK(unique.size() == combos.size());
    for (int idx = 0; idx < spec.size(); ++idx) {
      const PairTerm t = pair_term(spec, idx);
      CHECK(pair_index(spec, t.combo, t.own, t.input) == idx);
      CHECK(combos[t.combo] == std::make_pair(t.power_i, t.power_j));
      const double expect = std::pow(ai, t.power_i) * std::pow(aj, t.power_j) * own_factor(t.own, ti) *
                            input_factor(t.input, tj);
      CHECK(std::abs(row[idx] - expect) < 1e-13);
    }
  }
}

TEST_CASE("reduced combos allow each order up to n_m") {
  const auto combos = PairBasisSpec{1, 1, 1, PairMode::Reduced}.amplitude_combos();
  CHECK(combos == std::vector<std::pair<int, int>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  const auto obs = PairBasisSpec{1, 1, 1, PairMode::Observable}.amplitude_combos();
  CHECK(obs.size() == 3);
  for (auto [mi, mj] : obs) CHECK(mi + mj <= 1);
}

TEST_CASE("gradients match central differences") {
  const SingleBasisSpec spec{3, 3};
  Eigen::VectorXd q = Eigen::VectorXd::LinSpaced(spec.size(), -1.0, 1.0);
  const double th = 0.9, r = 1.1, h = 1e-6;
  const SingleGrad g = single_eval_grad(spec, q, th, r);
  CHECK(std::abs(g.value - single_row(spec, th, r).dot(q)) < 1e-12);
  CHECK(std::abs(g.d_angle - (single_eval(spec, q, th + h, r) - single_eval(spec, q, th - h, r)) / (2 * h)) < 1e-7);
  CHECK(std::abs(g.d_radius - (single_eval(spec, q, th, r + h) - single_eval(spec, q, th, r - h)) / (2 * h)) < 1e-7);

  const PairBasisSpec ps{2, 2, 2, PairMode::Observable};
  Eigen::VectorXd p = Eigen::VectorXd::LinSpaced(ps.size(), 0.5, -0.7);
  const double a[4] = {0.3, 0.2, -1.0, -0.1};
  const PairGrad pg = pair_eval_grad(ps, p, a[0], a[1], a[2], a[3]);
  auto f = [&](int k, double d) {
    double x[4] = {a[0], a[1], a[2], a[3]};
    x[k] += d;
    return pair_eval(ps, p, x[0], x[1], x[2], x[3]);
  };
  const double got[4] = {pg.d_theta_i, pg.d_amp_i, pg.d_theta_j, pg.d_amp_j};
  for (int k = 0; k < 4; ++k) CHECK(std::abs(got[k] - (f(k, h) - f(k, -h)) / (2 * h)) < 1e-7);
}

TEST_CASE("harmonics are periodic in the angle") {
  double c[6], s[6], c2[6], s2[6];
  harmonics(0.3, 5, c, s);
  harmonics(0.3 + 40.0 * kPi, 5, c2, s2);
  for (int k = 0; k <= 5; ++k) {
    CHECK(std::abs(c[k] - std::cos(k * 0.3)) < 1e-14);
    CHECK(std::abs(s[k] - std::sin(k * 0.3)) < 1e-14);
    CHECK(std::abs(c[k] - c2[k]) < 1e-11);
    CHECK(std::abs(s[k] - s2[k]) < 1e-11);
  }
  CHECK_THROWS_AS(single_row(SingleBasisSpec{1, kMaxStackHarmonics + 1}, 0.0, 1.0), Error);
}

TEST_CASE("fitted series rescales amplitudes by its units") {
  const SingleBasisSpec spec{2, 1};
  FittedSeries fs{spec, Eigen::VectorXd::LinSpaced(spec.size(), 1.0, 2.0), 4.0, 1.0};
  CHECK(fs.arity() == 2);
  const SeriesValue v = fs.eval_grad({0.7, 3.0});
  CHECK(std::abs(v.value - single_eval(spec, fs.coeffs, 0.7, 0.75)) < 1e-14);
  CHECK(std::abs(v.grad[1] - single_eval_grad(spec, fs.coeffs, 0.7, 0.75).d_radius / 4.0) < 1e-14);
  CHECK_THROWS_AS(fs.eval_grad({0.7}), Error);
}

TEST_CASE("amplitude unit is a power of two near the median") {
  CHECK(amplitude_unit({}) == 1.0);
  CHECK(amplitude_unit({0.0, -1.0}) == 1.0);
  CHECK(amplitude_unit({0.9, 1.0, 1.1}) == 1.0);
  const double u = amplitude_unit({3e-3, 4e-3, 5e-3});
  CHECK(std::abs(std::log2(u) - std::round(std::log2(u))) == 0.0);
  CHECK(u / 4e-3 < 2.0);
  CHECK(4e-3 / u < 2.0);
}

TEST_CASE("labels and invalid specs") {
  CHECK(own_factor_label(0, "phi_i") == "1");
  CHECK(own_factor_label(1, "phi_i") == "cos(phi_i)");
  CHECK(own_factor_label(4, "phi_i") == "sin(2phi_i)");
  CHECK(input_factor_label(1, "phi_j") == "sin(phi_j)");
  CHECK_THROWS_AS(single_row(SingleBasisSpec{-1, 2}, 0.0, 1.0), Error);
  CHECK_THROWS_AS(pair_row(PairBasisSpec{1, 1, 0, PairMode::Observable}, 0, 1, 0, 1), Error);
}
