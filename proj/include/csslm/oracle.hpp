#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include <csslm/dataset.hpp>
#include <csslm/errors.hpp>
#include <csslm/objective.hpp>
#include <csslm/regime.hpp>

namespace csslm {

struct OracleConfig {
  int restarts = 4;
  long long iterations = 1000000;
  double step_scale = 1.0;
  double tol = 1e-4;  // restart agreement required within this
};

struct OracleResult {
  Eigen::VectorXd a;
  double r = 0.0;
  double t = 0.0;
  double objective = 0.0;  // g scale
  double spread = 0.0;     // max disagreement across restarts
  bool agreed = true;
  std::vector<double> restart_objectives;
};

namespace detail {

inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Exact minimization of f(a, s, t) over (s, t >= 0) at fixed a. The
// restriction is piecewise linear, so the minimum sits on a vertex of the
// hinge arrangement: s on a breakline {-c_i} or {-d_j}, t at 0 or on a
// negative breakline s + d_j.
inline void exact_st(const Eigen::VectorXd& c, const Eigen::VectorXd& dneg, int m, int l,
                     const HyperParams& p, double a2, double& best_s, double& best_t,
                     double& best_f) {
  const int n = l - m;
  auto value = [&](double s, double t) {
    double v = 0.5 * p.nu * (a2 - s) - 0.5 * p.mu * t;
    for (int i = 0; i < m; ++i) v += std::max(c(i) + s, 0.0) / (2.0 * l);
    for (int j = 0; j < n; ++j) v += p.b * std::max(t - s - dneg(j), 0.0) / (2.0 * l);
    return v;
  };

  best_f = std::numeric_limits<double>::infinity();
  auto consider = [&](double s, double t) {
    const double v = value(s, t);
    if (v < best_f) {
      best_f = v;
      best_s = s;
      best_t = t;
    }
  };

  for (int i = 0; i < m; ++i) {
    const double s = -c(i);
    consider(s, 0.0);
    for (int j = 0; j < n; ++j)
      if (s + dneg(j) > 0.0) consider(s, s + dneg(j));
  }
  for (int j = 0; j < n; ++j) {
    const double s = -dneg(j);
    consider(s, 0.0);
    for (int j2 = 0; j2 < n; ++j2)
      if (s + dneg(j2) > 0.0) consider(s, s + dneg(j2));
  }
}

// Exact minimization of psi(a, z) over z at fixed a: one-dimensional
// piecewise linear with breakpoints z = -d_j. Ties prefer the largest z
// (smallest t), which reproduces the mu = 0 closed form.
inline void exact_z(const Eigen::VectorXd& dneg, int m, int l, const HyperParams& p,
                    double base, double a2, double& best_z, double& best_psi) {
  const int n = l - m;
  if (n == 0) {
    best_z = a2;  // t = 0; z only enters through vanished terms
    best_psi = base;
    return;
  }
  auto value = [&](double z) {
    double v = base + 0.5 * p.mu * z;
    for (int j = 0; j < n; ++j) v += p.b * std::max(-dneg(j) - z, 0.0) / (2.0 * l);
    return v;
  };
  best_z = -dneg(0);
  best_psi = value(best_z);
  for (int j = 1; j < n; ++j) {
    const double z = -dneg(j);
    const double v = value(z);
    const double tie = 1e-14 * (1.0 + std::abs(best_psi));
    if (v < best_psi - tie || (std::abs(v - best_psi) <= tie && z > best_z)) {
      best_psi = v;
      best_z = z;
    }
  }
}

}  // namespace detail

// Multi-start projected subgradient descent on the convex primal objective,
// with the piecewise-linear coordinates ((s, t) or z) minimized exactly at
// every step. All restarts must land on the same value: the problem is
// convex, so disagreement beyond cfg.tol marks the run as failed.
inline OracleResult brute_force_primal(const Dataset& d, const HyperParams& p,
                                       const OracleConfig& cfg = {}) {
  if (d.dim() > 10 || d.l() > 60)
    throw std::invalid_argument("oracle: instance too large (needs dim <= 10 and l <= 60)");
  if (cfg.restarts < 4) throw std::invalid_argument("oracle: at least 4 restarts required");
  if (cfg.iterations < 1) throw std::invalid_argument("oracle: iterations must be >= 1");

  const Regime reg = classify_regime(p, d.m, d.n);
  if (reg.kind == RegimeKind::Unbounded)
    throw UnboundedError(describe_regime(reg, p, d.m, d.n));
  if (reg.kind == RegimeKind::DegenerateLP)
    throw std::invalid_argument("oracle: the LP regime has no finite-horizon oracle");
  const bool main_mode = reg.kind == RegimeKind::MainQP;
  const double sigma = main_mode ? p.nu : static_cast<double>(d.m) / d.l() - p.mu;

  const Eigen::MatrixXd& F = d.x;
  const int l = d.l(), m = d.m, n = d.n, N = d.dim();
  Eigen::VectorXd kdiag(l);
  for (int i = 0; i < l; ++i) kdiag(i) = F.row(i).squaredNorm();
  const Eigen::VectorXd ahat = F.topRows(m).colwise().mean().transpose();
  const double scale = 1.0 + F.cwiseAbs().maxCoeff();
  const double pos_const = kdiag.head(m).sum();

  OracleResult out;
  double global_best = std::numeric_limits<double>::infinity();

  for (int ri = 0; ri < cfg.restarts; ++ri) {
    Eigen::VectorXd a(N);
    if (ri == 0)
      a.setZero();
    else if (ri == 1)
      a = ahat;
    else {
      std::mt19937_64 rng(9000 + 137 * static_cast<std::uint64_t>(ri));
      for (int j = 0; j < N; ++j)
        a(j) = ahat(j) + scale * (2.0 * detail::unit_uniform(rng) - 1.0);
    }

    double restart_best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_a = a;
    double best_s = 0.0, best_t = 0.0;

    for (long long k = 1; k <= cfg.iterations; ++k) {
      const double a2 = a.squaredNorm();
      const Eigen::VectorXd proj = F * a;

      double fval, s_star = 0.0, t_star = 0.0;
      Eigen::VectorXd grad;
      if (main_mode) {
        Eigen::VectorXd c(m), dneg(n);
        for (int i = 0; i < m; ++i) c(i) = kdiag(i) - 2.0 * proj(i);
        for (int j = 0; j < n; ++j) dneg(j) = kdiag(m + j) - 2.0 * proj(m + j);
        detail::exact_st(c, dneg, m, l, p, a2, s_star, t_star, fval);
        grad = p.nu * a;
        for (int i = 0; i < m; ++i)
          if (c(i) + s_star > 0.0) grad -= F.row(i).transpose() / l;
        for (int j = 0; j < n; ++j)
          if (t_star - s_star - dneg(j) > 0.0) grad += p.b * F.row(m + j).transpose() / l;
      } else {
        Eigen::VectorXd dneg(n);
        for (int j = 0; j < n; ++j) dneg(j) = kdiag(m + j) - 2.0 * proj(m + j);
        const double base =
            0.5 * sigma * a2 + (pos_const - 2.0 * proj.head(m).sum()) / (2.0 * l);
        double z_star;
        detail::exact_z(dneg, m, l, p, base, a2, z_star, fval);
        grad = sigma * a;
        for (int i = 0; i < m; ++i) grad -= F.row(i).transpose() / l;
        // z_star sits on a hinge breakpoint; those kink hinges carry the
        // fractional weight that zeroes d/dz, the valid subgradient there.
        const double eps = 1e-12 * (1.0 + std::abs(z_star));
        int n_act = 0, n_kink = 0;
        for (int j = 0; j < n; ++j) {
          const double active = -dneg(j) - z_star;
          if (active > eps) ++n_act;
          else if (active >= -eps) ++n_kink;
        }
        const double theta =
            n_kink > 0
                ? std::clamp(p.mu * l / p.b - n_act, 0.0, static_cast<double>(n_kink)) / n_kink
                : 0.0;
        for (int j = 0; j < n; ++j) {
          const double active = -dneg(j) - z_star;
          if (active > eps) grad += p.b * F.row(m + j).transpose() / l;
          else if (active >= -eps) grad += theta * p.b * F.row(m + j).transpose() / l;
        }
        s_star = a2;  // r = 0 in this regime
        t_star = std::max(a2 - z_star, 0.0);
      }

      if (fval < restart_best) {
        restart_best = fval;
        best_a = a;
        best_s = s_star;
        best_t = t_star;
      }

      a -= (cfg.step_scale / (sigma * k)) * grad;
    }

    out.restart_objectives.push_back(restart_best);
    if (restart_best < global_best) {
      global_best = restart_best;
      out.a = best_a;
      out.objective = restart_best;
      if (main_mode) {
        out.r = best_a.squaredNorm() - best_s;
        out.t = best_t;
      } else {
        out.r = 0.0;
        out.t = best_t;
      }
    }
  }

  const double worst = *std::max_element(out.restart_objectives.begin(),
                                         out.restart_objectives.end());
  out.spread = worst - global_best;
  out.agreed = out.spread <= cfg.tol;
  return out;
}

}  // namespace csslm
