#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <csslm/errors.hpp>
#include <csslm/kernel.hpp>
#include <csslm/regime.hpp>

namespace csslm {

enum class ThresholdMode { Inner, Mid, Outer };

inline const char* to_string(ThresholdMode t) {
  switch (t) {
    case ThresholdMode::Inner: return "inner";
    case ThresholdMode::Mid: return "mid";
    case ThresholdMode::Outer: return "outer";
  }
  return "?";
}

inline ThresholdMode threshold_from_string(const std::string& s) {
  if (s == "inner") return ThresholdMode::Inner;
  if (s == "mid") return ThresholdMode::Mid;
  if (s == "outer") return ThresholdMode::Outer;
  throw std::invalid_argument("unknown threshold mode: " + s);
}

struct DualVariables {
  // MainQP: length l. DegenerateQP/LP: length n (negatives only).
  // Empty for the closed form and SGD-trained models.
  Eigen::VectorXd alpha;
  double objective = std::numeric_limits<double>::quiet_NaN();    // primal QP scale (h)
  double objective_g = std::numeric_limits<double>::quiet_NaN();  // g scale = h / l
  int iterations = 0;
  double solver_residual = std::numeric_limits<double>::quiet_NaN();
};

// The optimal-set geometry for (r, t) at the (unique) optimal center:
// r ranges over [r_lower, r_upper], q = r + t over [q_lower, q_upper],
// subject to t >= 0. Ends may be +-infinity (empty index sets).
struct UniquenessReport {
  bool center_unique = true;
  bool radius_unique = true;
  bool margin_unique = true;
  double r_lower = 0.0, r_upper = 0.0;
  double q_lower = 0.0, q_upper = 0.0;
  int free_positive_sv = -1;  // canonical index, -1 when none
  int free_negative_sv = -1;
  bool clipped_at_zero = false;  // interval lower end was raised to 0
  std::string gamma_star;
};

struct KktRow {
  std::string name;
  double residual = 0.0;
};

struct KktReport {
  std::vector<KktRow> rows;
  double max_residual = 0.0;
  Eigen::VectorXd xi;  // recovered slacks, canonical order

  double residual(const std::string& name) const {
    for (const auto& row : rows)
      if (row.name == name) return row.residual;
    throw std::invalid_argument("no KKT group named " + name);
  }
};

struct NuRow {
  std::string name;
  double lhs = 0.0, rhs = 0.0;
  bool holds = true;
};

struct NuReport {
  bool applicable = false;
  std::string note;
  int margin_errors_pos = 0;  // m+: positives with xi > tol
  int margin_errors_neg = 0;  // n+
  int sv_pos = 0;             // s+: positives with alpha > tol
  int sv_neg = 0;             // s-
  std::vector<NuRow> rows;
  bool all_hold = true;
};

// A trained hypersphere. The center is either kernel-space,
// a = sum_j beta_j phi(x_j) over the retained support points, or an
// explicit feature-space vector (LP regime and SGD, where no representer
// form is available). beta_k_beta caches |a|^2 so prediction touches each
// support point once.
struct Model {
  KernelSpec kernel;
  HyperParams hyper;
  Regime regime;
  int l = 0, m = 0, n = 0;  // training-set sizes
  int dim = 0;              // raw input dimension

  Eigen::MatrixXd support_x;
  std::vector<int> support_y;
  std::vector<int> support_index;  // canonical training indices
  Eigen::VectorXd support_beta;
  Eigen::VectorXd center;  // explicit center; empty for kernel-space models

  double r = 0.0;  // squared radius
  double t = 0.0;  // squared margin
  double s = 0.0;  // |a|^2 - r
  double beta_k_beta = 0.0;
  ThresholdMode threshold = ThresholdMode::Mid;

  DualVariables dual;
  UniquenessReport uniqueness;
  NuReport nu;
  double kkt_max_residual = std::numeric_limits<double>::quiet_NaN();

  bool kernel_space() const { return center.size() == 0; }

  double threshold_value() const {
    switch (threshold) {
      case ThresholdMode::Inner: return r;
      case ThresholdMode::Mid: return r + 0.5 * t;
      case ThresholdMode::Outer: return r + t;
    }
    return r;
  }

  // Full-length coefficient vector (zeros off the support set).
  Eigen::VectorXd full_beta() const {
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(l);
    for (size_t j = 0; j < support_index.size(); ++j) beta(support_index[j]) = support_beta(j);
    return beta;
  }

  // Full-length dual vector in the regime's natural shape (l for MainQP,
  // n for the degenerate problems).
  Eigen::VectorXd full_alpha() const {
    if (regime.kind == RegimeKind::MainQP) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(l);
      if (dual.alpha.size() == l) return dual.alpha;
      for (size_t j = 0; j < support_index.size(); ++j)
        a(support_index[j]) = support_y[j] * support_beta(j) * (l * hyper.nu);
      return a;
    }
    if (dual.alpha.size() == n) return dual.alpha;
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (size_t j = 0; j < support_index.size(); ++j)
      if (support_index[j] >= m)
        a(support_index[j] - m) = -support_beta(j) * (l * regime.lambda);
    return a;
  }
};

struct Prediction {
  double dist2 = 0.0;
  double score = 0.0;
  int label = -1;
};

// Squared kernel-space distance from phi(x) to the center, then the
// threshold rule: theta = r (inner), r + t/2 (mid), r + t (outer);
// strictly inside is +1, the boundary itself classifies as -1.
inline Prediction predict_point(const Model& mo, const Eigen::VectorXd& xq) {
  if (mo.kernel.kind == KernelKind::Precomputed)
    throw std::invalid_argument("prediction needs a kernel function; model has a precomputed Gram");
  if (static_cast<int>(xq.size()) != mo.dim)
    throw std::invalid_argument("query dimension " + std::to_string(xq.size()) +
                                " does not match model dimension " + std::to_string(mo.dim));
  double d2;
  if (mo.kernel_space()) {
    double cross = 0.0;
    for (int j = 0; j < mo.support_beta.size(); ++j)
      cross += mo.support_beta(j) * eval_kernel(mo.kernel, xq, mo.support_x.row(j).transpose());
    d2 = eval_kernel(mo.kernel, xq, xq) - 2.0 * cross + mo.beta_k_beta;
  } else {
    const Eigen::VectorXd phi = feature_vector(mo.kernel, xq);
    d2 = phi.squaredNorm() - 2.0 * phi.dot(mo.center) + mo.beta_k_beta;
  }
  Prediction p;
  p.dist2 = d2;
  const double theta = mo.threshold_value();
  const double tie_tol = 1e-12 * (1.0 + std::abs(theta));
  p.score = theta - d2;
  p.label = d2 <= theta - tie_tol ? 1 : -1;
  return p;
}

inline std::vector<Prediction> predict(const Model& mo, const Eigen::MatrixXd& X) {
  std::vector<Prediction> out;
  out.reserve(X.rows());
  for (int i = 0; i < X.rows(); ++i) out.push_back(predict_point(mo, X.row(i).transpose()));
  return out;
}

}  // namespace csslm
