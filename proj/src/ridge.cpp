#include "pharec/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pharec/error.hpp"

namespace pharec {

namespace {

void set_rank(SvdContext& ctx) {
  const double s1 = ctx.singular_values.size() ? ctx.singular_values[0] : 0.0;
  ctx.rank_tol = 1e-14 * static_cast<double>(std::max(ctx.n_rows, ctx.n_cols)) * s1;
  ctx.rank = 0;
  for (Eigen::Index l = 0; l < ctx.singular_values.size(); ++l) {
    if (ctx.singular_values[l] > ctx.rank_tol) ++ctx.rank;
  }
}

// Complement k/(s^2+k), formed directly so small k does not cancel.
double shrink(const SvdContext& ctx, Eigen::Index l, double kappa) {
  const double s = ctx.singular_values[l];
  if (!(s > ctx.rank_tol)) return 1.0;
  return kappa / (s * s + kappa);
}

double residual_norm2(const SvdContext& ctx, Eigen::Index target, double kappa) {
  double r2 = ctx.perp_norm2[target];
  for (Eigen::Index l = 0; l < ctx.singular_values.size(); ++l) {
    const double u = ctx.uty(l, target);
    const double f = shrink(ctx, l, kappa);
    r2 += f * f * u * u;
  }
  return r2;
}

}  // namespace

SvdContext make_svd_context(const Eigen::MatrixXd& design, const Eigen::MatrixXd& targets) {
  const Eigen::Index n = design.rows();
  const Eigen::Index m = design.cols();
  const Eigen::Index p = targets.cols();
  if (n < 1 || m < 1) throw Error(ErrorCode::ShapeMismatch, "design must be at least 1x1");
  if (targets.rows() != n) {
    throw Error(ErrorCode::ShapeMismatch, "design has " + std::to_string(n) + " rows, targets " +
                                              std::to_string(targets.rows()));
  }
  if (!design.allFinite() || !targets.allFinite()) {
    throw Error(ErrorCode::ShapeMismatch, "design and targets must be finite");
  }
  SvdContext ctx;
  ctx.n_rows = n;
  ctx.n_cols = m;
  if (n > 2 * m && n >= m + p) {
    // Tall case: QR of [design | targets]; the SVD of R11 carries the
    // spectrum, R12 = Q1^T y and |R22 column| = |y - Q1 Q1^T y|.
    Eigen::MatrixXd aug(n, m + p);
    aug.leftCols(m) = design;
    aug.rightCols(p) = targets;
    Eigen::HouseholderQR<Eigen::Ref<Eigen::MatrixXd>> qr(aug);
    const Eigen::MatrixXd r = aug.topRows(m + p).triangularView<Eigen::Upper>();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(r.topLeftCorner(m, m), Eigen::ComputeFullU | Eigen::ComputeFullV);
    ctx.singular_values = svd.singularValues();
    ctx.v = svd.matrixV();
    ctx.uty = svd.matrixU().transpose() * r.topRightCorner(m, p);
    ctx.perp_norm2 = r.bottomRightCorner(p, p).colwise().squaredNorm().transpose();
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    ctx.singular_values = svd.singularValues();
    ctx.v = svd.matrixV();
    ctx.uty = svd.matrixU().transpose() * targets;
    const Eigen::MatrixXd perp = targets - svd.matrixU() * ctx.uty;
    ctx.perp_norm2 = perp.colwise().squaredNorm().transpose();
  }
  set_rank(ctx);
  return ctx;
}

std::vector<double> default_kappa_grid(const SvdContext& ctx) {
  const double s1 = ctx.singular_values.size() ? ctx.singular_values[0] : 0.0;
  std::vector<double> grid;
  if (ctx.full_rank()) grid.push_back(0.0);
  if (!(s1 > 0.0)) return grid;
  const double lo = std::log10(1e-10 * s1 * s1);
  const double hi = std::log10(1e2 * s1 * s1);
  constexpr int kCount = 40;
  for (int i = 0; i < kCount; ++i) {
    grid.push_back(std::pow(10.0, lo + (hi - lo) * i / (kCount - 1)));
  }
  return grid;
}

double effective_dof(const SvdContext& ctx, double kappa) {
  // n - sum(filter) rewritten as (n - #directions) + sum(shrink); exact in exact arithmetic.
  double sum = static_cast<double>(ctx.n_rows - ctx.singular_values.size());
  for (Eigen::Index l = 0; l < ctx.singular_values.size(); ++l) sum += shrink(ctx, l, kappa);
  return sum;
}

double gcv_score(const SvdContext& ctx, Eigen::Index target, double kappa) {
  if (!(kappa >= 0.0)) throw Error(ErrorCode::ShapeMismatch, "kappa must be nonnegative");
  const double tau = effective_dof(ctx, kappa);
  if (tau <= 1e-12) throw Error(ErrorCode::ZeroDof, "effective degrees of freedom vanish");
  return residual_norm2(ctx, target, kappa) / (tau * tau);
}

RidgeFit ridge_solve(const SvdContext& ctx, Eigen::Index target, const KappaPolicy& policy) {
  if (target < 0 || target >= ctx.uty.cols()) throw Error(ErrorCode::ShapeMismatch, "target index");
  double kappa = 0.0;
  double best_gcv = std::numeric_limits<double>::quiet_NaN();
  if (policy.kind == KappaPolicy::Kind::Fixed) {
    kappa = policy.kappa;
    if (!(kappa >= 0.0)) throw Error(ErrorCode::ShapeMismatch, "kappa must be nonnegative");
    if (!(ctx.singular_values.size() && ctx.singular_values[0] > 0.0) ||
        (kappa == 0.0 && !ctx.full_rank())) {
      throw Error(ErrorCode::DegenerateDesign, "design is rank-deficient and kappa is 0");
    }
  } else {
    std::vector<double> grid = policy.candidates.empty() ? default_kappa_grid(ctx) : policy.candidates;
    std::sort(grid.begin(), grid.end());
    bool found = false;
    for (double k : grid) {
      if (!(k >= 0.0)) throw Error(ErrorCode::ShapeMismatch, "kappa candidates must be nonnegative");
      if (k == 0.0 && !ctx.full_rank()) continue;
      if (effective_dof(ctx, k) <= 1e-12) continue;
      const double g = gcv_score(ctx, target, k);
      // Ascending scan with <= keeps the largest kappa among ties.
      if (!found || g <= best_gcv) {
        best_gcv = g;
        kappa = k;
        found = true;
      }
    }
    if (!found) throw Error(ErrorCode::DegenerateDesign, "no admissible kappa candidate");
  }
  RidgeFit fit;
  fit.kappa = kappa;
  fit.singular_values = ctx.singular_values;
  Eigen::VectorXd w(ctx.singular_values.size());
  for (Eigen::Index l = 0; l < w.size(); ++l) {
    const double s = ctx.singular_values[l];
    w[l] = s > ctx.rank_tol ? s / (s * s + kappa) * ctx.uty(l, target) : 0.0;
  }
  fit.q = ctx.v * w;
  fit.effective_dof = effective_dof(ctx, kappa);
  const double r2 = residual_norm2(ctx, target, kappa);
  fit.residual_norm = std::sqrt(std::max(0.0, r2));
  fit.gcv_value = fit.effective_dof > 1e-12 ? r2 / (fit.effective_dof * fit.effective_dof)
                                            : std::numeric_limits<double>::infinity();
  return fit;
}

RidgeFit ridge_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets,
                   const KappaPolicy& policy) {
  const SvdContext ctx = make_svd_context(design, targets);
  return ridge_solve(ctx, 0, policy);
}

}  // namespace pharec
