#pragma once

#include <algorithm>
#include <cstdio>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include <csslm/dataset.hpp>
#include <csslm/kernel.hpp>
#include <csslm/model.hpp>
#include <csslm/qp.hpp>
#include <csslm/regime.hpp>

namespace csslm {

namespace detail {

inline void require_regime(const Regime& got, RegimeKind want, const char* op) {
  if (got.kind != want)
    throw std::invalid_argument(std::string(op) + " requires regime " + to_string(want) +
                                ", but hyperparameters give " + to_string(got.kind));
}

}  // namespace detail

// Dual of the main QP over alpha in R^l (minimization form):
//   min  1/2 sum_ij y_i y_j k_ij alpha_i alpha_j / (l nu) - sum_i y_i k_ii alpha_i / 2
//   s.t. sum_i y_i alpha_i = l nu,  sum_{i>m} alpha_i >= l mu,
//        0 <= alpha_i <= 1 (i <= m),  0 <= alpha_i <= b (i > m).
// The reported optimum of this minimization is the negative of the primal
// QP optimum (strong duality), so callers negate to land on the h scale.
inline QpProblem assemble_main_dual(const Eigen::MatrixXd& K, const Dataset& d,
                                    const HyperParams& p) {
  detail::require_regime(classify_regime(p, d.m, d.n), RegimeKind::MainQP, "assemble_main_dual");
  const int l = d.l(), m = d.m;
  const double lnu = l * p.nu;

  QpProblem qp(l);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) qp.Q(i, j) = d.y[i] * d.y[j] * K(i, j) / lnu;
  for (int i = 0; i < l; ++i) qp.c(i) = -0.5 * d.y[i] * K(i, i);

  qp.A.resize(1, l);
  for (int i = 0; i < l; ++i) qp.A(0, i) = d.y[i];
  qp.b.resize(1);
  qp.b(0) = lnu;

  if (d.n > 0) {
    // -sum_{i>m} alpha_i <= -l mu ; with n = 0 the row is vacuous (0 <= 0).
    qp.G = Eigen::MatrixXd::Zero(1, l);
    for (int i = m; i < l; ++i) qp.G(0, i) = -1.0;
    qp.h.resize(1);
    qp.h(0) = -l * p.mu;
  }

  qp.lo.setZero();
  for (int i = 0; i < l; ++i) qp.hi(i) = i < m ? 1.0 : p.b;
  return qp;
}

// The primal QP over (a, s, t, xi) for kernels with explicit features:
//   min  (l nu / 2)(|a|^2 - s) - (l mu / 2) t + sum_{i<=m} xi_i + b sum_{i>m} xi_i
//   s.t. k_ii/2 - <phi_i, a> + s/2 - xi_i <= 0            (i <= m)
//        -k_ii/2 + <phi_i, a> - s/2 + t/2 - xi_i <= 0     (i > m)
//        t >= 0, xi >= 0  (a and s free; r >= 0 is intentionally absent).
inline QpProblem assemble_primal_qp(const Eigen::MatrixXd& F, const Dataset& d,
                                    const HyperParams& p) {
  detail::require_regime(classify_regime(p, d.m, d.n), RegimeKind::MainQP, "assemble_primal_qp");
  const int l = d.l(), m = d.m;
  const int D = static_cast<int>(F.cols());
  const int is = D, it = D + 1, ixi = D + 2;  // variable offsets

  QpProblem qp(D + 2 + l);
  qp.Q.topLeftCorner(D, D) = l * p.nu * Eigen::MatrixXd::Identity(D, D);
  qp.c(is) = -0.5 * l * p.nu;
  qp.c(it) = -0.5 * l * p.mu;
  for (int i = 0; i < l; ++i) qp.c(ixi + i) = i < m ? 1.0 : p.b;

  qp.G = Eigen::MatrixXd::Zero(l, qp.n());
  qp.h.resize(l);
  for (int i = 0; i < l; ++i) {
    const double kii = F.row(i).squaredNorm();
    if (i < m) {
      qp.G.row(i).head(D) = -F.row(i);
      qp.G(i, is) = 0.5;
      qp.h(i) = -0.5 * kii;
    } else {
      qp.G.row(i).head(D) = F.row(i);
      qp.G(i, is) = -0.5;
      qp.G(i, it) = 0.5;
      qp.h(i) = 0.5 * kii;
    }
    qp.G(i, ixi + i) = -1.0;
  }

  qp.lo(it) = 0.0;
  for (int i = 0; i < l; ++i) qp.lo(ixi + i) = 0.0;
  return qp;
}

// Dual of the degenerate QP, over alpha in R^n (negatives only):
//   min  1/(2 l lambda) sum_{ij} k_ij alpha_i alpha_j
//        + 1/2 sum_i (k_ii - (2/(l lambda)) sum_{j<=m} k_ji) alpha_i
//        + 1/(2 l lambda) sum_{i,j<=m} k_ij              [folded constant]
//   s.t. sum alpha_i = l mu,  0 <= alpha <= b.
// Negating the solved minimum gives the degenerate objective f~*.
inline QpProblem assemble_degenerate_dual(const Eigen::MatrixXd& K, const Dataset& d,
                                          const HyperParams& p) {
  const Regime reg = classify_regime(p, d.m, d.n);
  const int l = d.l(), m = d.m, n = d.n;
  // n = 0 with 0 < mu < m/l classifies as Unbounded, yet the assembled
  // equality 0 = l mu is simply infeasible; let the solver report that.
  const bool empty_negatives = n == 0 && p.mu > 0.0 && p.mu * l < m;
  if (!empty_negatives)
    detail::require_regime(reg, RegimeKind::DegenerateQP, "assemble_degenerate_dual");
  const double ll = l * (empty_negatives ? m / static_cast<double>(l) - p.mu : reg.lambda);

  QpProblem qp(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) qp.Q(i, j) = K(m + i, m + j) / ll;
  for (int i = 0; i < n; ++i) {
    double cross = 0.0;
    for (int j = 0; j < m; ++j) cross += K(m + i, j);
    qp.c(i) = 0.5 * K(m + i, m + i) - cross / ll;
  }
  qp.A = Eigen::MatrixXd::Ones(1, n);
  qp.b.resize(1);
  qp.b(0) = l * p.mu;
  qp.lo.setZero();
  qp.hi.setConstant(p.b);
  qp.constant = K.topLeftCorner(m, m).sum() / (2.0 * ll);
  return qp;
}

// The degenerate LP over (a, z, xi_{m+1..l}) for mu = m/l:
//   min  (l mu / 2) z - m <a_hat, a> + b sum xi_i
//   s.t. -k_ii/2 + <phi_i, a> - z/2 - xi_i <= 0  (i > m),  xi >= 0,
// with a_hat the positive-class feature mean. No |a|^2 term, hence no
// representer form: explicit features are mandatory here.
inline QpProblem assemble_lp(const Eigen::MatrixXd& F, const Dataset& d, const HyperParams& p) {
  detail::require_regime(classify_regime(p, d.m, d.n), RegimeKind::DegenerateLP, "assemble_lp");
  const int l = d.l(), m = d.m, n = d.n;
  const int D = static_cast<int>(F.cols());
  const int iz = D, ixi = D + 1;

  const Eigen::VectorXd ahat = F.topRows(m).colwise().mean().transpose();

  QpProblem qp(D + 1 + n);
  qp.c.head(D) = -m * ahat;
  qp.c(iz) = 0.5 * l * p.mu;
  for (int i = 0; i < n; ++i) qp.c(ixi + i) = p.b;

  qp.G = Eigen::MatrixXd::Zero(n, qp.n());
  qp.h.resize(n);
  for (int i = 0; i < n; ++i) {
    qp.G.row(i).head(D) = F.row(m + i);
    qp.G(i, iz) = -0.5;
    qp.G(i, ixi + i) = -1.0;
    qp.h(i) = 0.5 * F.row(m + i).squaredNorm();
  }
  for (int i = 0; i < n; ++i) qp.lo(ixi + i) = 0.0;
  return qp;
}

// mu = 0 with nu >= m/l: the optimum is available in closed form. The
// center is the positive-class mean a_hat (beta_i = 1/m), r = 0, and t is
// the squared kernel distance from a_hat to the nearest negative (0 when
// there are no negatives).
inline Model closed_form_mu0(const Eigen::MatrixXd& K, const Dataset& d, const HyperParams& p,
                             const KernelSpec& spec = KernelSpec::linear()) {
  const Regime reg = classify_regime(p, d.m, d.n);
  detail::require_regime(reg, RegimeKind::TrivialClosedForm, "closed_form_mu0");
  const int l = d.l(), m = d.m, n = d.n;

  Model mo;
  mo.kernel = spec;
  mo.hyper = p;
  mo.regime = reg;
  mo.l = l;
  mo.m = m;
  mo.n = n;
  mo.dim = d.dim();

  mo.support_x = d.x.topRows(m);
  mo.support_y.assign(m, 1);
  mo.support_index.resize(m);
  for (int i = 0; i < m; ++i) mo.support_index[i] = i;
  mo.support_beta = Eigen::VectorXd::Constant(m, 1.0 / m);

  mo.beta_k_beta = K.topLeftCorner(m, m).sum() / (static_cast<double>(m) * m);
  mo.r = 0.0;
  mo.s = mo.beta_k_beta;

  double tmin = 0.0;
  if (n > 0) {
    tmin = std::numeric_limits<double>::infinity();
    for (int i = m; i < l; ++i) {
      const double dist2 = K(i, i) - 2.0 * K.row(i).head(m).sum() / m + mo.beta_k_beta;
      tmin = std::min(tmin, dist2);
    }
  }
  mo.t = std::max(tmin, 0.0);

  // g = (1/2l) sum_{i<=m} |phi_i - a_hat|^2 (the mu-weighted term vanishes)
  double pos_spread = 0.0;
  for (int i = 0; i < m; ++i)
    pos_spread += K(i, i) - 2.0 * K.row(i).head(m).sum() / m + mo.beta_k_beta;
  mo.dual.objective_g = pos_spread / (2.0 * l);
  mo.dual.objective = l * mo.dual.objective_g;

  mo.uniqueness.center_unique = true;
  mo.uniqueness.radius_unique = true;
  mo.uniqueness.margin_unique = false;  // any t in [0, t*] is optimal at mu = 0
  mo.uniqueness.r_lower = mo.uniqueness.r_upper = 0.0;
  mo.uniqueness.q_lower = 0.0;
  mo.uniqueness.q_upper = n > 0 ? mo.t : std::numeric_limits<double>::infinity();
  char buf[128];
  std::snprintf(buf, sizeof buf, "r = 0, t in [0, %.9g] (mu = 0 leaves the margin free)",
                mo.uniqueness.q_upper);
  mo.uniqueness.gamma_star = buf;

  mo.nu.applicable = false;
  mo.nu.note = "nu-property does not apply to the TrivialClosedForm regime";
  return mo;
}

}  // namespace csslm
