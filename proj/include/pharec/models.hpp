#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "pharec/ode.hpp"

namespace pharec {

enum class ModelKind { RadialIsochronClock, Canonical, VanDerPol, WilsonCowan };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct OscillatorParams {
  double a = 0.0;      // radial isochron clock decay; canonical shear; Wilson-Cowan a
  double alpha = 0.0;  // canonical decay
  double mu = 0.0;     // van der Pol
  double b = 0.0, c = 0.0, d = 0.0;
  double rho_x = 0.0, rho_y = 0.0;
};

struct ModelSpec {
  ModelKind kind = ModelKind::RadialIsochronClock;
  std::vector<OscillatorParams> osc;
  // eps[i][j]: strength of the input oscillator i receives from j.
  std::vector<std::vector<double>> eps;
  std::size_t size() const { return osc.size(); }
};

// Two uni-directionally coupled oscillators; oscillator 0 drives 1.
ModelSpec default_model(ModelKind kind);
void validate(const ModelSpec& spec);
bool is_polar_native(ModelKind kind);

// Observable polar coordinates about (cx, cy): x = cx + r cos θ,
// y = cy + orientation r sin θ; orientation makes θ increase along the cycle.
struct ObservableFrame {
  double cx = 0.0;
  double cy = 0.0;
  double orientation = 1.0;
};

// Planar vector field in observable polar coordinates (θ, r).
struct PlanarSystem {
  PlanarField f;
  PlanarJacobian jac;  // may be empty
};

double sigmoid(double z);

class NetworkModel {
 public:
  explicit NetworkModel(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  std::size_t size() const { return spec_.size(); }
  const ObservableFrame& frame(std::size_t i) const { return frames_.at(i); }
  Vec2 wc_equilibrium(std::size_t i) const { return equilibria_.at(i); }

  // Exact model derivatives in native coordinates including coupling.
  std::vector<Vec2> eval_model_vf(const std::vector<Vec2>& native) const;
  void eval_flat(const Eigen::VectorXd& x, Eigen::VectorXd& dx) const;

  Vec2 uncoupled_native(std::size_t i, const Vec2& xi) const;
  Mat2 uncoupled_native_jacobian(std::size_t i, const Vec2& xi) const;
  // Contribution to oscillator i's native derivative due to oscillator j.
  Vec2 coupling_native(std::size_t i, std::size_t j, const Vec2& xi, const Vec2& xj) const;

  Vec2 to_observable(std::size_t i, const Vec2& native) const;
  Vec2 to_native(std::size_t i, const Vec2& observable) const;

  PlanarSystem uncoupled_polar(std::size_t i) const;
  // Coupling of i due to j expressed as (dθ_i/dt, dr_i/dt) in observable coordinates.
  Vec2 coupling_polar(std::size_t i, std::size_t j, const Vec2& obs_i, const Vec2& obs_j) const;

 private:
  ModelSpec spec_;
  std::vector<ObservableFrame> frames_;
  std::vector<Vec2> equilibria_;
};

// Fixed point of the uncoupled Wilson-Cowan oscillator by damped Newton from (0.5, 0.5).
Vec2 wc_equilibrium(const OscillatorParams& p);

struct InverseValue {
  double phi = 0.0, phi_theta = 0.0, phi_r = 0.0;
  double sigma = 0.0, sigma_theta = 0.0, sigma_r = 0.0;
};

// Closed-form transformations; σ is the unscaled amplitude of the analytic maps.
struct AnalyticGroundTruth {
  ModelKind kind = ModelKind::RadialIsochronClock;
  double a = 0.0;
  double alpha = 0.0;
  double lambda = 0.0;
  double omega = 0.0;
  // q^(r)_{1,0}: converts analytic σ into the averaging module's scaled σ.
  double amplitude_scale = 1.0;

  InverseValue inverse(double theta, double r) const;
  double k_theta(double phi, double sigma) const;
  double k_r(double phi, double sigma) const;
};

AnalyticGroundTruth analytic_ground_truth(const ModelSpec& spec, std::size_t i);

// Exact (g^φ, g^σ) of oscillator i due to j in unscaled reduced coordinates.
Vec2 exact_reduced_coupling(const ModelSpec& spec, std::size_t i, std::size_t j, double phi_i,
                            double sigma_i, double phi_j, double sigma_j);

// One printed expansion coefficient in pair-basis factor encoding
// (own: 1 cos φ_i, 2 sin φ_i; input: 0 cos φ_j, 1 sin φ_j).
struct PrintedTerm {
  bool phase = true;
  int n_i = 0;
  int n_j = 0;
  int own = 0;
  int input = 0;
  double coef = 0.0;
};

// Printed amplitude-order <= 2 expansion of the reduced coupling, unscaled σ.
std::vector<PrintedTerm> printed_reduced_coupling(const ModelSpec& spec, std::size_t i,
                                                  std::size_t j);
// Re-expresses terms in scaled amplitudes σ~ = s σ.
std::vector<PrintedTerm> scale_printed_terms(std::vector<PrintedTerm> terms, double s_i,
                                             double s_j);

}  // namespace pharec
