#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include <Eigen/Dense>

#include <csslm/dataset.hpp>
#include <csslm/kernel.hpp>
#include <csslm/model.hpp>
#include <csslm/regime.hpp>

namespace csslm {

namespace detail {

// Complementarity products x*y are reported as |xy| / (1 + |xy|): zero at
// optimality, monotone in the violation, and bounded so a single large
// product stays comparable with the scaled feasibility rows.
inline double comp(double prod) {
  return std::abs(prod) / (1.0 + std::abs(prod));
}

inline void push_row(KktReport& rep, const std::string& name, double residual) {
  rep.rows.push_back({name, residual});
  rep.max_residual = std::max(rep.max_residual, residual);
}

// Squared kernel distances |Phi(x_i) - a|^2 for every training point, with
// a represented through the model's full-length beta.
inline Eigen::VectorXd train_dist2(const Eigen::MatrixXd& K, const Eigen::VectorXd& beta) {
  const double bkb = beta.dot(K * beta);
  Eigen::VectorXd d2(K.rows());
  for (int i = 0; i < K.rows(); ++i) d2(i) = K(i, i) - 2.0 * K.row(i).dot(beta) + bkb;
  return d2;
}

}  // namespace detail

// Evaluates the optimality system the trained regime is certified by:
// the full main KKT system for MainQP, its degenerate analogue for
// DegenerateQP, closed-form identities for TrivialClosedForm, and LP
// optimality through the stored dual multipliers for DegenerateLP.
// Every row is scaled by (1 + magnitude): feasibility and stationarity
// against the size of the terms entering them, complementarity products
// against their own size.
inline KktReport check_kkt(const Model& mo, const Eigen::MatrixXd& K, const Dataset& d,
                           const HyperParams& p) {
  const int l = d.l(), m = d.m;
  KktReport rep;
  const Eigen::VectorXd beta = mo.kernel_space() ? mo.full_beta() : Eigen::VectorXd();

  if (mo.regime.kind == RegimeKind::MainQP) {
    const Eigen::VectorXd alpha = mo.full_alpha();
    const Eigen::VectorXd dist2 = detail::train_dist2(K, beta);
    const double q = mo.r + mo.t;
    const double lnu = l * p.nu, lmu = l * p.mu;

    rep.xi.resize(l);
    for (int i = 0; i < l; ++i)
      rep.xi(i) = i < m ? std::max(0.0, 0.5 * (dist2(i) - mo.r))
                        : std::max(0.0, 0.5 * (q - dist2(i)));

    double feas = std::max(0.0, -mo.t);
    for (int i = 0; i < l; ++i) {
      const double viol = i < m ? dist2(i) - mo.r - 2.0 * rep.xi(i)
                                : q - dist2(i) - 2.0 * rep.xi(i);
      feas = std::max(feas, std::max(viol, 0.0) / (1.0 + std::abs(dist2(i))));
      feas = std::max(feas, std::max(-rep.xi(i), 0.0));
    }
    const double bkb = beta.dot(K * beta);
    feas = std::max(feas, std::abs(mo.s - (bkb - mo.r)) / (1.0 + std::abs(mo.s)));
    detail::push_row(rep, "primal_feasibility", feas);

    double stat = 0.0;
    for (int i = 0; i < l; ++i)
      stat = std::max(stat, std::abs(beta(i) - d.y[i] * alpha(i) / lnu) / (1.0 + std::abs(beta(i))));
    detail::push_row(rep, "stationarity", stat);

    double yalpha = 0.0, neg_sum = 0.0;
    for (int i = 0; i < l; ++i) {
      yalpha += d.y[i] * alpha(i);
      if (i >= m) neg_sum += alpha(i);
    }
    double dualf = std::abs(yalpha - lnu) / (1.0 + lnu);
    dualf = std::max(dualf, std::max(lmu - neg_sum, 0.0) / (1.0 + lmu));
    for (int i = 0; i < l; ++i) {
      const double bound = i < m ? 1.0 : p.b;
      dualf = std::max(dualf, std::max(-alpha(i), 0.0));
      dualf = std::max(dualf, std::max(alpha(i) - bound, 0.0) / (1.0 + bound));
    }
    detail::push_row(rep, "dual_feasibility", dualf);

    double comp_slack = 0.0, comp_con = 0.0;
    for (int i = 0; i < l; ++i) {
      const double bound = i < m ? 1.0 : p.b;
      comp_slack = std::max(comp_slack, detail::comp(rep.xi(i) * (bound - alpha(i))));
      const double con = i < m ? dist2(i) - mo.r - 2.0 * rep.xi(i)
                               : q - dist2(i) - 2.0 * rep.xi(i);
      comp_con = std::max(comp_con, detail::comp(con * alpha(i)));
    }
    detail::push_row(rep, "complementarity_slack", comp_slack);
    detail::push_row(rep, "complementarity_constraint", comp_con);
    detail::push_row(rep, "margin_complementarity", detail::comp(mo.t * (neg_sum - lmu)));
    return rep;
  }

  if (mo.regime.kind == RegimeKind::DegenerateQP) {
    const Eigen::VectorXd alpha = mo.full_alpha();  // length n
    const Eigen::VectorXd dist2 = detail::train_dist2(K, beta);
    const double ll = l * mo.regime.lambda, lmu = l * p.mu;

    rep.xi = Eigen::VectorXd::Zero(l);
    for (int i = m; i < l; ++i) rep.xi(i) = std::max(0.0, 0.5 * (mo.t - dist2(i)));

    double feas = std::max(0.0, -mo.t) + std::abs(mo.r);
    for (int i = m; i < l; ++i) {
      const double viol = mo.t - dist2(i) - 2.0 * rep.xi(i);
      feas = std::max(feas, std::max(viol, 0.0) / (1.0 + std::abs(dist2(i))));
    }
    const double bkb = beta.dot(K * beta);
    feas = std::max(feas, std::abs(mo.s - bkb) / (1.0 + std::abs(mo.s)));
    detail::push_row(rep, "primal_feasibility", feas);

    double stat = 0.0;
    for (int i = 0; i < l; ++i) {
      const double want = i < m ? 1.0 / ll : -alpha(i - m) / ll;
      stat = std::max(stat, std::abs(beta(i) - want) / (1.0 + std::abs(want)));
    }
    detail::push_row(rep, "stationarity", stat);

    double dualf = std::abs(alpha.sum() - lmu) / (1.0 + lmu);
    for (int i = 0; i < alpha.size(); ++i) {
      dualf = std::max(dualf, std::max(-alpha(i), 0.0));
      dualf = std::max(dualf, std::max(alpha(i) - p.b, 0.0) / (1.0 + p.b));
    }
    detail::push_row(rep, "dual_feasibility", dualf);

    double comp_slack = 0.0, comp_con = 0.0;
    for (int i = m; i < l; ++i) {
      comp_slack = std::max(comp_slack, detail::comp(rep.xi(i) * (p.b - alpha(i - m))));
      const double con = mo.t - dist2(i) - 2.0 * rep.xi(i);
      comp_con = std::max(comp_con, detail::comp(con * alpha(i - m)));
    }
    detail::push_row(rep, "complementarity_slack", comp_slack);
    detail::push_row(rep, "complementarity_constraint", comp_con);
    return rep;
  }

  if (mo.regime.kind == RegimeKind::TrivialClosedForm) {
    const Eigen::VectorXd dist2 = detail::train_dist2(K, beta);
    rep.xi = Eigen::VectorXd::Zero(l);

    double ident = std::abs(mo.r);
    for (int i = 0; i < l; ++i) {
      const double want = i < m ? 1.0 / m : 0.0;
      ident = std::max(ident, std::abs(beta(i) - want));
    }
    detail::push_row(rep, "center_identity", ident);

    double tmin = 0.0;
    if (l > m) {
      tmin = dist2.tail(l - m).minCoeff();
      tmin = std::max(tmin, 0.0);
    }
    detail::push_row(rep, "margin_identity", std::abs(mo.t - tmin) / (1.0 + std::abs(tmin)));

    const double bkb = beta.dot(K * beta);
    detail::push_row(rep, "primal_feasibility",
                     std::abs(mo.s - bkb) / (1.0 + std::abs(mo.s)) + std::max(0.0, -mo.t));
    return rep;
  }

  // DegenerateLP: certify through the stored inequality multipliers.
  const Eigen::VectorXd alpha = mo.dual.alpha;  // length n
  const int n = l - m;
  if (alpha.size() != n) throw std::invalid_argument("LP model is missing its dual multipliers");
  const double lmu = l * p.mu;
  const Eigen::VectorXd& a = mo.center;

  const Eigen::MatrixXd F = feature_matrix(mo.kernel, d);
  Eigen::VectorXd dist2(l);
  for (int i = 0; i < l; ++i) dist2(i) = (F.row(i).transpose() - a).squaredNorm();

  rep.xi = Eigen::VectorXd::Zero(l);
  for (int i = m; i < l; ++i) rep.xi(i) = std::max(0.0, 0.5 * (mo.t - dist2(i)));

  double feas = std::max(0.0, -mo.t);
  for (int i = m; i < l; ++i) {
    const double viol = mo.t - dist2(i) - 2.0 * rep.xi(i);
    feas = std::max(feas, std::max(viol, 0.0) / (1.0 + std::abs(dist2(i))));
  }
  detail::push_row(rep, "primal_feasibility", feas);

  double dualf = std::abs(alpha.sum() - lmu) / (1.0 + lmu);
  for (int i = 0; i < n; ++i) {
    dualf = std::max(dualf, std::max(-alpha(i), 0.0));
    dualf = std::max(dualf, std::max(alpha(i) - p.b, 0.0) / (1.0 + p.b));
  }
  detail::push_row(rep, "dual_feasibility", dualf);

  // Representer condition sum_{i>m} alpha_i Phi(x_i) = sum_{i<=m} Phi(x_i),
  // measured in kernel space: |sum_i v_i Phi(x_i)|^2 with v = (-1, alpha).
  Eigen::VectorXd v(l);
  for (int i = 0; i < l; ++i) v(i) = i < m ? -1.0 : alpha(i - m);
  const double rep2 = std::max(v.dot(K * v), 0.0);
  detail::push_row(rep, "stationarity", std::sqrt(rep2) / (1.0 + m));

  double comp_slack = 0.0, comp_con = 0.0;
  for (int i = m; i < l; ++i) {
    comp_slack = std::max(comp_slack, detail::comp(rep.xi(i) * (p.b - alpha(i - m))));
    comp_con = std::max(comp_con, detail::comp((mo.t - dist2(i) - 2.0 * rep.xi(i)) * alpha(i - m)));
  }
  detail::push_row(rep, "complementarity_slack", comp_slack);
  detail::push_row(rep, "complementarity_constraint", comp_con);

  const double z = a.squaredNorm() - mo.t;
  const Eigen::VectorXd ahat = F.topRows(m).colwise().mean().transpose();
  double primal_obj = 0.5 * lmu * z - m * ahat.dot(a);
  for (int i = m; i < l; ++i) primal_obj += p.b * rep.xi(i);
  double dual_obj = 0.0;
  for (int i = m; i < l; ++i) dual_obj -= 0.5 * K(i, i) * alpha(i - m);
  detail::push_row(rep, "duality_gap", std::abs(primal_obj - dual_obj) / (1.0 + std::abs(primal_obj)));
  return rep;
}

// The nu-property: counts of margin errors and support vectors bound the
// hyperparameters. Evaluated from the model alone (support points carry all
// nonzero multipliers; every off-support point has alpha = 0 and xi = 0).
inline NuReport nu_property(const Model& mo, double tol = 1e-6) {
  NuReport rep;
  if (mo.regime.kind != RegimeKind::MainQP && mo.regime.kind != RegimeKind::DegenerateQP) {
    rep.applicable = false;
    rep.note = std::string("nu-property applies to MainQP and DegenerateQP only (regime is ") +
               to_string(mo.regime.kind) + ")";
    return rep;
  }
  if (mo.kernel.kind == KernelKind::Precomputed)
    throw std::invalid_argument("nu-property needs a kernel function, not a precomputed Gram matrix");

  rep.applicable = true;
  const int l = mo.l, m = mo.m, n = mo.n;
  const double q = mo.r + mo.t;

  const int ns = static_cast<int>(mo.support_index.size());
  for (int j = 0; j < ns; ++j) {
    double cross = 0.0;
    for (int k = 0; k < ns; ++k)
      cross += mo.support_beta(k) *
               eval_kernel(mo.kernel, mo.support_x.row(j).transpose(), mo.support_x.row(k).transpose());
    const double kjj =
        eval_kernel(mo.kernel, mo.support_x.row(j).transpose(), mo.support_x.row(j).transpose());
    const double dist2 = kjj - 2.0 * cross + mo.beta_k_beta;
    const bool positive = mo.support_index[j] < m;

    double alpha;
    if (mo.regime.kind == RegimeKind::MainQP)
      alpha = l * mo.hyper.nu * mo.support_y[j] * mo.support_beta(j);
    else
      alpha = positive ? 0.0 : -l * mo.regime.lambda * mo.support_beta(j);

    const double xi = positive ? std::max(0.0, 0.5 * (dist2 - mo.r))
                               : std::max(0.0, 0.5 * (q - dist2));
    if (positive) {
      if (xi > tol) ++rep.margin_errors_pos;
      if (alpha > tol) ++rep.sv_pos;
    } else {
      if (xi > tol) ++rep.margin_errors_neg;
      if (alpha > tol) ++rep.sv_neg;
    }
  }

  const double nu = mo.hyper.nu, mu = mo.hyper.mu, b = mo.hyper.b;
  const double mp = rep.margin_errors_pos, np = rep.margin_errors_neg;
  const double sp = rep.sv_pos, sn = rep.sv_neg;
  auto add = [&](const std::string& name, double lhs, double rhs) {
    rep.rows.push_back({name, lhs, rhs, lhs <= rhs + tol});
  };

  if (mo.regime.kind == RegimeKind::DegenerateQP) {
    rep.note = "degenerate regime: mu bounds the negative margin-error and SV fractions";
    add("n+/l <= mu/b", np / l, mu / b);
    add("mu/b <= s-/l", mu / b, sn / static_cast<double>(l));
  } else if (n == 0 && mu == 0.0) {
    rep.note = "one-class case: nu bounds the error and SV fractions over the positives";
    add("m+/m <= nu", mp / m, nu);
    add("nu <= s+/m", nu, sp / static_cast<double>(m));
  } else if (mo.t > tol) {
    rep.note = "positive optimal margin: two-sided chains";
    add("m+/l <= nu+mu", mp / l, nu + mu);
    add("nu+mu <= s+/l", nu + mu, sp / static_cast<double>(l));
    add("n+/l <= mu/b", np / l, mu / b);
    add("mu/b <= s-/l", mu / b, sn / static_cast<double>(l));
  } else {
    rep.note = "zero optimal margin: mixed bounds";
    add("m+/l <= nu + b s-/l", mp / l, nu + b * sn / l);
    add("nu + b n+/l <= s+/l", nu + b * np / l, sp / static_cast<double>(l));
    add("mu/b <= s-/l", mu / b, sn / static_cast<double>(l));
  }

  rep.all_hold = true;
  for (const auto& row : rep.rows) rep.all_hold = rep.all_hold && row.holds;
  return rep;
}

}  // namespace csslm
