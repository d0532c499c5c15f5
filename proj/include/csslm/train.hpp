#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include <csslm/assemble.hpp>
#include <csslm/dataset.hpp>
#include <csslm/errors.hpp>
#include <csslm/kernel.hpp>
#include <csslm/model.hpp>
#include <csslm/qp.hpp>
#include <csslm/regime.hpp>
#include <csslm/verify.hpp>

namespace csslm {

struct Recovery {
  Eigen::VectorXd beta;  // length l, pruned of numerically-zero entries
  double r = 0.0;
  double t = 0.0;
  UniquenessReport uniqueness;
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline std::string format_interval(double lo, double hi) {
  char buf[96];
  auto fmt = [](double v, char* out, size_t cap) {
    if (v == kInf)
      std::snprintf(out, cap, "inf");
    else if (v == -kInf)
      std::snprintf(out, cap, "-inf");
    else
      std::snprintf(out, cap, "%.9g", v);
  };
  char a[32], b[32];
  fmt(lo, a, sizeof a);
  fmt(hi, b, sizeof b);
  std::snprintf(buf, sizeof buf, "[%s, %s]", a, b);
  return buf;
}

inline void prune_tiny(Eigen::VectorXd& beta) {
  const double cutoff = 1e-12 * std::max(1.0, beta.cwiseAbs().maxCoeff());
  for (int i = 0; i < beta.size(); ++i)
    if (std::abs(beta(i)) < cutoff) beta(i) = 0.0;
}

}  // namespace detail

// Recover (beta, r, t) and the uniqueness certificate from a solver-optimal
// alpha of the main dual. The optimal (r, t) set is the interval system
// Gamma*: r in [r_l, r_u], r + t in [q_l, q_u], t >= 0, with the four bounds
// read off the support-vector index sets. A free SV (multiplier strictly
// inside its box) collapses its interval to a point.
inline Recovery recover_main(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& K,
                             const Dataset& d, const HyperParams& p, double tol) {
  const int l = d.l(), m = d.m;
  const double lnu = l * p.nu;

  Recovery rec;
  rec.beta.resize(l);
  for (int i = 0; i < l; ++i) rec.beta(i) = d.y[i] * alpha(i) / lnu;
  detail::prune_tiny(rec.beta);

  const double bkb = rec.beta.dot(K * rec.beta);
  Eigen::VectorXd dist2(l);
  for (int i = 0; i < l; ++i) dist2(i) = K(i, i) - 2.0 * K.row(i).dot(rec.beta) + bkb;

  const double hi_pos = 1.0 - tol;
  const double hi_neg = p.b - tol * std::max(1.0, p.b);

  double r_l = -detail::kInf, r_u = detail::kInf;
  double q_l = -detail::kInf, q_u = detail::kInf;
  int free_pos = -1, free_neg = -1;
  double free_pos_margin = 0.0, free_neg_margin = 0.0;
  bool any_sv_pos = false;

  for (int i = 0; i < m; ++i) {
    if (alpha(i) < hi_pos) r_l = std::max(r_l, dist2(i));
    if (alpha(i) > tol) {
      r_u = std::min(r_u, dist2(i));
      any_sv_pos = true;
    }
    const double margin = std::min(alpha(i) - tol, hi_pos - alpha(i));
    if (margin > 0.0 && margin > free_pos_margin) {
      free_pos = i;
      free_pos_margin = margin;
    }
  }
  for (int i = m; i < l; ++i) {
    if (alpha(i) > tol) q_l = std::max(q_l, dist2(i));
    if (alpha(i) < hi_neg) q_u = std::min(q_u, dist2(i));
    const double margin = std::min(alpha(i) - tol, hi_neg - alpha(i));
    if (margin > 0.0 && margin > free_neg_margin) {
      free_neg = i;
      free_neg_margin = margin;
    }
  }

  if (!any_sv_pos)
    throw SolverError(
        "no positive support vector found; contradicts sum_i y_i alpha_i = l nu > 0 "
        "(solver output is not optimal)");

  UniquenessReport& u = rec.uniqueness;
  u.center_unique = true;
  u.free_positive_sv = free_pos;
  u.free_negative_sv = free_neg;

  double neg_sum = 0.0;
  for (int i = m; i < l; ++i) neg_sum += alpha(i);

  if (neg_sum > l * p.mu + tol) {
    // Margin complementarity forces t = 0; the radius set is the
    // intersection [max(r_l, q_l), min(r_u, q_u)].
    double lo = std::max(r_l, q_l);
    double hi = std::min(r_u, q_u);
    if (lo == -detail::kInf) lo = 0.0;
    rec.t = 0.0;
    if (free_pos >= 0)
      rec.r = dist2(free_pos);
    else if (free_neg >= 0)
      rec.r = dist2(free_neg);
    else
      rec.r = 0.5 * (lo + hi);
    u.radius_unique = free_pos >= 0 || free_neg >= 0 || hi - lo <= tol;
    u.margin_unique = true;
    u.r_lower = lo;
    u.r_upper = hi;
    u.q_lower = lo;
    u.q_upper = hi;
    u.gamma_star = "t = 0 (margin complementarity is strict), r in " +
                   detail::format_interval(lo, hi);
    return rec;
  }

  double r;
  if (free_pos >= 0)
    r = dist2(free_pos);
  else if (r_l == -detail::kInf)
    r = r_u;
  else
    r = 0.5 * (r_l + r_u);

  double q;
  if (free_neg >= 0)
    q = dist2(free_neg);
  else if (q_l == -detail::kInf && q_u == detail::kInf)
    q = r;  // no negatives: t unconstrained in the objective, take 0
  else if (q_l == -detail::kInf)
    q = r;  // no negative SV (mu = 0): any t in [0, q_u - r] optimal, take 0
  else if (q_u == detail::kInf)
    q = q_l;
  else
    q = 0.5 * (q_l + q_u);

  if (q < r) {
    // Clamp t = q - r >= 0 by re-picking r on the intersected interval.
    rec.t = 0.0;
    u.clipped_at_zero = true;
    const double lo = std::max(r_l == -detail::kInf ? 0.0 : r_l, q_l);
    const double hi = std::min(r_u, q_u);
    rec.r = free_pos >= 0 ? dist2(free_pos) : free_neg >= 0 ? dist2(free_neg) : 0.5 * (lo + hi);
  } else {
    rec.r = r;
    rec.t = q - r;
  }

  const bool q_finite = q_l != -detail::kInf && q_u != detail::kInf;
  u.radius_unique = free_pos >= 0 || (r_l != -detail::kInf && r_u - r_l <= tol);
  const bool q_pinned = free_neg >= 0 || (q_finite && q_u - q_l <= tol);
  u.margin_unique = u.radius_unique && q_pinned;
  u.r_lower = r_l;
  u.r_upper = r_u;
  u.q_lower = q_l;
  u.q_upper = q_u;
  u.gamma_star = "r in " + detail::format_interval(r_l, r_u) + ", r + t in " +
                 detail::format_interval(q_l, q_u) + ", t >= 0";
  return rec;
}

// Degenerate recovery: r = 0 is forced, the center pattern is fixed by the
// regime (beta_i = 1/(l lambda) on positives), and t comes from the negative
// support-vector distance interval.
inline Recovery recover_degenerate(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& K,
                                   const Dataset& d, const HyperParams& p, double lambda,
                                   double tol) {
  const int l = d.l(), m = d.m, n = d.n;
  const double ll = l * lambda;

  Recovery rec;
  rec.beta.resize(l);
  for (int i = 0; i < m; ++i) rec.beta(i) = 1.0 / ll;
  for (int i = 0; i < n; ++i) rec.beta(m + i) = -alpha(i) / ll;
  detail::prune_tiny(rec.beta);

  const double bkb = rec.beta.dot(K * rec.beta);
  Eigen::VectorXd dist2(n);
  for (int i = 0; i < n; ++i)
    dist2(i) = K(m + i, m + i) - 2.0 * K.row(m + i).dot(rec.beta) + bkb;

  const double hi_neg = p.b - tol * std::max(1.0, p.b);
  double t_l = -detail::kInf, t_u = detail::kInf;
  int free_neg = -1;
  double free_margin = 0.0;
  for (int i = 0; i < n; ++i) {
    if (alpha(i) > tol) t_l = std::max(t_l, dist2(i));
    if (alpha(i) < hi_neg) t_u = std::min(t_u, dist2(i));
    const double margin = std::min(alpha(i) - tol, hi_neg - alpha(i));
    if (margin > 0.0 && margin > free_margin) {
      free_neg = i;
      free_margin = margin;
    }
  }

  UniquenessReport& u = rec.uniqueness;
  u.center_unique = true;  // strictly convex in a whenever lambda > 0
  u.radius_unique = true;
  u.free_negative_sv = free_neg >= 0
                           ? (d.source_row.empty() ? m + free_neg : d.source_row[m + free_neg])
                           : -1;
  rec.r = 0.0;

  if (alpha.sum() > l * p.mu + tol) {
    // Unreachable through (prob.dual2), whose constraint is an equality;
    // kept as a defensive check on the solver output.
    rec.t = 0.0;
    u.margin_unique = true;
    u.gamma_star = "t = 0 (defensive: sum alpha exceeded l mu)";
  } else {
    if (free_neg >= 0)
      rec.t = dist2(free_neg);
    else if (t_u == detail::kInf)
      rec.t = t_l == -detail::kInf ? 0.0 : t_l;
    else if (t_l == -detail::kInf)
      rec.t = t_u;  // no SV at all: mu > 0 pushes t to its upper bound
    else
      rec.t = 0.5 * (t_l + t_u);
    rec.t = std::max(rec.t, 0.0);
    const bool finite = t_l != -detail::kInf && t_u != detail::kInf;
    u.margin_unique = free_neg >= 0 || (finite && t_u - t_l <= tol);
    u.gamma_star = "r = 0, t in " + detail::format_interval(t_l, t_u);
  }
  u.r_lower = u.r_upper = 0.0;
  u.q_lower = t_l;
  u.q_upper = t_u;
  return rec;
}

struct TrainOptions {
  double tol = 1e-7;            // KKT residual budget is 10 * tol
  double solver_tol = 1e-9;     // interior-point convergence tolerance
  int max_iter = 200;
  ThresholdMode threshold = ThresholdMode::Mid;
  std::ostream* log = nullptr;
};

namespace detail {

inline void fill_support(Model& mo, const Dataset& d, const Eigen::VectorXd& beta) {
  std::vector<int> idx;
  for (int i = 0; i < beta.size(); ++i)
    if (beta(i) != 0.0) idx.push_back(i);
  mo.support_index = idx;
  mo.support_x.resize(idx.size(), d.dim());
  mo.support_y.resize(idx.size());
  mo.support_beta.resize(idx.size());
  for (size_t j = 0; j < idx.size(); ++j) {
    mo.support_x.row(j) = d.x.row(idx[j]);
    mo.support_y[j] = d.y[idx[j]];
    mo.support_beta(j) = beta(idx[j]);
  }
}

inline QpSolution solve_or_throw(const QpProblem& prob, const QpOptions& opt, const char* what) {
  QpSolution sol = solve_qp(prob, opt);
  if (sol.status == QpStatus::Optimal) return sol;
  throw SolverError(std::string(what) + " solve failed: status " + to_string(sol.status) +
                    " after " + std::to_string(sol.iterations) + " iterations (residual " +
                    std::to_string(sol.kkt_residual) + ")");
}

}  // namespace detail

inline Model train(const Dataset& d, const KernelSpec& spec, const HyperParams& p,
                   const TrainOptions& opt = {}) {
  const Regime reg = classify_regime(p, d.m, d.n);
  if (reg.kind == RegimeKind::Unbounded)
    throw UnboundedError(describe_regime(reg, p, d.m, d.n));

  const Eigen::MatrixXd K = gram(spec, d);
  const int l = d.l(), m = d.m, n = d.n;
  const double recover_tol = std::max(1e-6, 10.0 * opt.solver_tol);

  QpOptions qopt;
  qopt.tol = opt.solver_tol;
  qopt.max_iter = opt.max_iter;
  qopt.log = opt.log;

  Model mo;
  mo.kernel = spec;
  mo.hyper = p;
  mo.regime = reg;
  mo.l = l;
  mo.m = m;
  mo.n = n;
  mo.dim = d.dim();
  mo.threshold = opt.threshold;

  switch (reg.kind) {
    case RegimeKind::TrivialClosedForm:
      mo = closed_form_mu0(K, d, p, spec);
      mo.threshold = opt.threshold;
      break;

    case RegimeKind::MainQP: {
      const QpProblem prob = assemble_main_dual(K, d, p);
      const QpSolution sol = detail::solve_or_throw(prob, qopt, "main dual");
      const Recovery rec = recover_main(sol.x, K, d, p, recover_tol);
      detail::fill_support(mo, d, rec.beta);
      mo.r = rec.r;
      mo.t = rec.t;
      mo.beta_k_beta = rec.beta.dot(K * rec.beta);
      mo.s = mo.beta_k_beta - mo.r;
      mo.uniqueness = rec.uniqueness;
      mo.dual.alpha = sol.x;
      mo.dual.objective = -sol.objective;  // primal QP scale (h = l g)
      mo.dual.objective_g = mo.dual.objective / l;
      mo.dual.iterations = sol.iterations;
      mo.dual.solver_residual = sol.kkt_residual;
      break;
    }

    case RegimeKind::DegenerateQP: {
      const QpProblem prob = assemble_degenerate_dual(K, d, p);
      const QpSolution sol = detail::solve_or_throw(prob, qopt, "degenerate dual");
      const Recovery rec = recover_degenerate(sol.x, K, d, p, reg.lambda, recover_tol);
      detail::fill_support(mo, d, rec.beta);
      mo.r = rec.r;
      mo.t = rec.t;
      mo.beta_k_beta = rec.beta.dot(K * rec.beta);
      mo.s = mo.beta_k_beta;  // r = 0
      mo.uniqueness = rec.uniqueness;
      mo.dual.alpha = sol.x;
      // -sol.objective is the degenerate objective f~*; shift to h = l g.
      mo.dual.objective = -sol.objective + 0.5 * K.topLeftCorner(m, m).diagonal().sum();
      mo.dual.objective_g = mo.dual.objective / l;
      mo.dual.iterations = sol.iterations;
      mo.dual.solver_residual = sol.kkt_residual;
      break;
    }

    case RegimeKind::DegenerateLP: {
      if (!has_explicit_features(spec, d.dim()))
        throw SolverError(std::string("degenerate LP regime: explicit features required (kernel '") +
                          to_string(spec.kind) + "' has no explicit feature map here)");
      const Eigen::MatrixXd F = feature_matrix(spec, d);
      const QpProblem prob = assemble_lp(F, d, p);
      QpSolution sol = solve_qp(prob, qopt);
      if (sol.status == QpStatus::Unbounded)
        throw SolverError(
            "degenerate LP is unbounded below for this data (no finite optimal sphere); "
            "status Unbounded");
      if (sol.status != QpStatus::Optimal)
        throw SolverError(std::string("degenerate LP solve failed: status ") +
                          to_string(sol.status));
      const int D = static_cast<int>(F.cols());
      mo.center = sol.x.head(D);
      const double z = sol.x(D);
      mo.r = 0.0;
      mo.t = std::max(mo.center.squaredNorm() - z, 0.0);
      mo.beta_k_beta = mo.center.squaredNorm();
      mo.s = mo.beta_k_beta;
      mo.dual.alpha = sol.z_ineq;
      mo.dual.objective = sol.objective + 0.5 * K.topLeftCorner(m, m).diagonal().sum();
      mo.dual.objective_g = mo.dual.objective / l;
      mo.dual.iterations = sol.iterations;
      mo.dual.solver_residual = sol.kkt_residual;
      mo.uniqueness.center_unique = false;
      mo.uniqueness.radius_unique = true;  // r = 0 forced
      mo.uniqueness.margin_unique = false;
      mo.uniqueness.r_lower = mo.uniqueness.r_upper = 0.0;
      mo.uniqueness.q_lower = -detail::kInf;
      mo.uniqueness.q_upper = detail::kInf;
      mo.uniqueness.gamma_star =
          "LP regime: optimum may be a face of the feasible set; uniqueness not certified";
      break;
    }

    case RegimeKind::Unbounded:
      break;  // unreachable
  }

  const KktReport kkt = check_kkt(mo, K, d, p);
  mo.kkt_max_residual = kkt.max_residual;
  const double kkt_budget = 10.0 * opt.tol * (1.0 + std::abs(mo.dual.objective));
  if (kkt.max_residual > kkt_budget)
    throw SolverError("trained model violates its KKT certificate: max residual " +
                      std::to_string(kkt.max_residual) + " exceeds " +
                      std::to_string(kkt_budget));

  if (spec.kind == KernelKind::Precomputed) {
    mo.nu.applicable = false;
    mo.nu.note = "nu-property not evaluated for precomputed kernels";
  } else {
    mo.nu = nu_property(mo, 1e-6);
  }
  return mo;
}

}  // namespace csslm
