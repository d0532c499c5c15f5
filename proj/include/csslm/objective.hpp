#pragma once

#include <algorithm>

#include <Eigen/Dense>

#include <csslm/regime.hpp>

namespace csslm {

// Evaluators for the feature-space objectives. Rows of F are the mapped
// points phi(x_i) in canonical order (positives first, m of them), so the
// hinge weights follow from the row index alone.
//
// f is the convex substitution s = |a|^2 - r of the hypersphere objective g:
// the |a|^2 inside each hinge cancels, leaving hinges affine in (a, s, t).

inline double eval_f(const Eigen::MatrixXd& F, int m, const HyperParams& p,
                     const Eigen::VectorXd& a, double s, double t) {
  const int l = static_cast<int>(F.rows());
  double value = 0.5 * p.nu * (a.squaredNorm() - s) - 0.5 * p.mu * t;
  for (int i = 0; i < l; ++i) {
    const double kii = F.row(i).squaredNorm();
    const double proj = 2.0 * F.row(i).dot(a);
    if (i < m)
      value += std::max(kii - proj + s, 0.0) / (2.0 * l);
    else
      value += p.b * std::max(-s + t - kii + proj, 0.0) / (2.0 * l);
  }
  return value;
}

inline double eval_g(const Eigen::MatrixXd& F, int m, const HyperParams& p,
                     const Eigen::VectorXd& a, double r, double t) {
  return eval_f(F, m, p, a, a.squaredNorm() - r, t);
}

// Degenerate objective psi(a, z) = g(a, 0, |a|^2 - z), convex whenever
// mu <= m/l. The quadratic coefficient is lambda/2 = (m/l - mu)/2, so the
// LP regime (lambda = 0) is the affine-in-a special case.
inline double eval_psi(const Eigen::MatrixXd& F, int m, const HyperParams& p,
                       const Eigen::VectorXd& a, double z) {
  const int l = static_cast<int>(F.rows());
  const double lambda = static_cast<double>(m) / l - p.mu;
  double value = 0.5 * lambda * a.squaredNorm() + 0.5 * p.mu * z;
  double pos_lin = 0.0, pos_const = 0.0;
  for (int i = 0; i < m; ++i) {
    pos_lin += F.row(i).dot(a);
    pos_const += F.row(i).squaredNorm();
  }
  value += (pos_const - 2.0 * pos_lin) / (2.0 * l);
  for (int i = m; i < l; ++i) {
    const double active = 2.0 * F.row(i).dot(a) - F.row(i).squaredNorm() - z;
    value += p.b * std::max(active, 0.0) / (2.0 * l);
  }
  return value;
}

struct FSubgradient {
  double value = 0.0;
  Eigen::VectorXd a;
  double s = 0.0;
  double t = 0.0;
};

inline FSubgradient f_subgradient(const Eigen::MatrixXd& F, int m, const HyperParams& p,
                                  const Eigen::VectorXd& a, double s, double t) {
  const int l = static_cast<int>(F.rows());
  FSubgradient g;
  g.value = 0.5 * p.nu * (a.squaredNorm() - s) - 0.5 * p.mu * t;
  g.a = p.nu * a;
  g.s = -0.5 * p.nu;
  g.t = -0.5 * p.mu;
  for (int i = 0; i < l; ++i) {
    const double kii = F.row(i).squaredNorm();
    const double proj = 2.0 * F.row(i).dot(a);
    if (i < m) {
      const double margin = kii - proj + s;
      if (margin > 0.0) {
        g.value += margin / (2.0 * l);
        g.a -= F.row(i).transpose() / l;
        g.s += 0.5 / l;
      }
    } else {
      const double margin = -s + t - kii + proj;
      if (margin > 0.0) {
        g.value += p.b * margin / (2.0 * l);
        g.a += p.b * F.row(i).transpose() / l;
        g.s -= 0.5 * p.b / l;
        g.t += 0.5 * p.b / l;
      }
    }
  }
  return g;
}

struct PsiSubgradient {
  double value = 0.0;
  Eigen::VectorXd a;
  double z = 0.0;
};

inline PsiSubgradient psi_subgradient(const Eigen::MatrixXd& F, int m, const HyperParams& p,
                                      const Eigen::VectorXd& a, double z) {
  const int l = static_cast<int>(F.rows());
  const double lambda = static_cast<double>(m) / l - p.mu;
  PsiSubgradient g;
  g.value = 0.5 * lambda * a.squaredNorm() + 0.5 * p.mu * z;
  g.a = lambda * a;
  g.z = 0.5 * p.mu;
  for (int i = 0; i < m; ++i) {
    const double kii = F.row(i).squaredNorm();
    g.value += (kii - 2.0 * F.row(i).dot(a)) / (2.0 * l);
    g.a -= F.row(i).transpose() / l;
  }
  for (int i = m; i < l; ++i) {
    const double active = 2.0 * F.row(i).dot(a) - F.row(i).squaredNorm() - z;
    if (active > 0.0) {
      g.value += p.b * active / (2.0 * l);
      g.a += p.b * F.row(i).transpose() / l;
      g.z -= 0.5 * p.b / l;
    }
  }
  return g;
}

}  // namespace csslm
