#pragma once

#include <Eigen/Dense>
#include <vector>

namespace pharec {

// Spectral summary of a design matrix and its targets: enough to evaluate
// ridge solutions, residuals and GCV for any kappa in O(M) per target.
struct SvdContext {
  Eigen::Index n_rows = 0;
  Eigen::Index n_cols = 0;
  Eigen::VectorXd singular_values;  // nonincreasing
  Eigen::MatrixXd v;                // right singular vectors, n_cols x rank_max
  Eigen::MatrixXd uty;              // U^T y per target column
  Eigen::VectorXd perp_norm2;       // |y - U U^T y|^2 per target
  double rank_tol = 0.0;            // 1e-14 max(N, M) sigma_1
  Eigen::Index rank = 0;            // singular values above rank_tol
  bool full_rank() const { return rank == n_cols; }
};

SvdContext make_svd_context(const Eigen::MatrixXd& design, const Eigen::MatrixXd& targets);

struct KappaPolicy {
  enum class Kind { Fixed, GcvGrid };
  Kind kind = Kind::GcvGrid;
  double kappa = 0.0;              // Fixed
  std::vector<double> candidates;  // GcvGrid; empty selects the default grid

  static KappaPolicy fixed(double k) { return {Kind::Fixed, k, {}}; }
  static KappaPolicy gcv(std::vector<double> c = {}) { return {Kind::GcvGrid, 0.0, std::move(c)}; }
};

struct RidgeFit {
  Eigen::VectorXd q;
  double kappa = 0.0;
  double gcv_value = 0.0;
  double effective_dof = 0.0;
  Eigen::VectorXd singular_values;
  double residual_norm = 0.0;
};

// 40 log-spaced values in [1e-10 s1^2, 1e2 s1^2], ascending, preceded by 0
// when the design has full column rank.
std::vector<double> default_kappa_grid(const SvdContext& ctx);

double effective_dof(const SvdContext& ctx, double kappa);
double gcv_score(const SvdContext& ctx, Eigen::Index target, double kappa);

RidgeFit ridge_solve(const SvdContext& ctx, Eigen::Index target, const KappaPolicy& policy);
RidgeFit ridge_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets,
                   const KappaPolicy& policy);

}  // namespace pharec
