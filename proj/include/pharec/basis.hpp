#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pharec {

// Largest harmonic order any basis or cycle profile may use.
inline constexpr int kMaxStackHarmonics = 128;

// Row layout: for n = 0..n_n: r^n, then r^n cos kθ, r^n sin kθ for k = 1..n_k.
struct SingleBasisSpec {
  int n_n = 4;
  int n_k = 5;
  int size() const { return (n_n + 1) * (2 * n_k + 1); }
  bool operator==(const SingleBasisSpec&) const = default;
};

struct SingleTerm {
  int n = 0;
  int k = 0;
  bool is_sin = false;
  bool operator==(const SingleTerm&) const = default;
};

SingleTerm single_term(const SingleBasisSpec& spec, int index);
int single_index(const SingleBasisSpec& spec, const SingleTerm& term);

enum class PairMode { Observable, Reduced };

// Row layout: for each amplitude combination (see amplitude_combos), own
// factors {1, cos k θ_i, sin k θ_i} (rows) times input factors
// {cos k θ_j, sin k θ_j}, k >= 1 (columns), row-major.
struct PairBasisSpec {
  int n_m = 2;
  int n_ki = 2;
  int n_kj = 2;
  PairMode mode = PairMode::Observable;
  int own_count() const { return 2 * n_ki + 1; }
  int input_count() const { return 2 * n_kj; }
  // Observable: m_i + m_j <= n_m, m_i outer. Reduced: n_i, n_j <= n_m, n_i outer.
  std::vector<std::pair<int, int>> amplitude_combos() const;
  int size() const;
  bool operator==(const PairBasisSpec&) const = default;
};

struct PairTerm {
  int combo = 0;
  int power_i = 0;
  int power_j = 0;
  int own = 0;    // 0 -> 1, 2k-1 -> cos k, 2k -> sin k
  int input = 0;  // 2(k-1) -> cos k, 2k-1 -> sin k
  bool operator==(const PairTerm&) const = default;
};

PairTerm pair_term(const PairBasisSpec& spec, int index);
int pair_index(const PairBasisSpec& spec, int combo, int own, int input);
std::string own_factor_label(int own, const std::string& angle);
std::string input_factor_label(int input, const std::string& angle);

// cos(k a), sin(k a) for k = 0..kmax from the angle reduced to (-pi, pi].
void harmonics(double angle, int kmax, double* c, double* s);

void single_row(const SingleBasisSpec& spec, double angle, double radius, double* out);
Eigen::RowVectorXd single_row(const SingleBasisSpec& spec, double angle, double radius);

void pair_row(const PairBasisSpec& spec, double theta_i, double amp_i, double theta_j,
              double amp_j, double* out);
Eigen::RowVectorXd pair_row(const PairBasisSpec& spec, double theta_i, double amp_i,
                            double theta_j, double amp_j);

struct SingleGrad {
  double value = 0.0;
  double d_angle = 0.0;
  double d_radius = 0.0;
};

struct PairGrad {
  double value = 0.0;
  double d_theta_i = 0.0;
  double d_amp_i = 0.0;
  double d_theta_j = 0.0;
  double d_amp_j = 0.0;
};

SingleGrad single_eval_grad(const SingleBasisSpec& spec, const Eigen::VectorXd& q, double angle,
                            double radius);
double single_eval(const SingleBasisSpec& spec, const Eigen::VectorXd& q, double angle,
                   double radius);
PairGrad pair_eval_grad(const PairBasisSpec& spec, const Eigen::VectorXd& q, double theta_i,
                        double amp_i, double theta_j, double amp_j);
double pair_eval(const PairBasisSpec& spec, const Eigen::VectorXd& q, double theta_i,
                 double amp_i, double theta_j, double amp_j);

struct SeriesValue {
  double value = 0.0;
  std::vector<double> grad;  // angle, amplitude[, angle_j, amplitude_j]
};

// Amplitudes enter the basis as a / unit; units are powers of two so the
// rescaling is exact.
struct FittedSeries {
  std::variant<SingleBasisSpec, PairBasisSpec> spec;
  Eigen::VectorXd coeffs;
  double unit_i = 1.0;  // amplitude unit of the (own) oscillator
  double unit_j = 1.0;  // amplitude unit of the input oscillator

  int arity() const;
  int basis_size() const;
  SeriesValue eval_grad(const std::vector<double>& point) const;
};

// Power of two nearest the median of positive amplitudes; 1 when empty.
double amplitude_unit(std::vector<double> amplitudes);

}  // namespace pharec
