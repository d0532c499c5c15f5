#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include <csslm/dataset.hpp>
#include <csslm/errors.hpp>

namespace csslm {

enum class KernelKind { Linear, Rbf, Polynomial, Precomputed };

struct KernelSpec {
  KernelKind kind = KernelKind::Linear;
  double gamma = 1.0;    // rbf: exp(-gamma * |x-y|^2)
  int degree = 3;        // polynomial: (coef0 + <x,y>)^degree
  double coef0 = 1.0;
  Eigen::MatrixXd matrix;  // precomputed Gram, used in place of evaluation

  static KernelSpec linear() { return {}; }
  static KernelSpec rbf(double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("rbf kernel requires gamma > 0");
    KernelSpec s;
    s.kind = KernelKind::Rbf;
    s.gamma = gamma;
    return s;
  }
  static KernelSpec polynomial(int degree, double coef0) {
    if (degree < 1) throw std::invalid_argument("polynomial kernel requires degree >= 1");
    KernelSpec s;
    s.kind = KernelKind::Polynomial;
    s.degree = degree;
    s.coef0 = coef0;
    return s;
  }
  static KernelSpec precomputed(Eigen::MatrixXd K) {
    if (K.rows() != K.cols()) throw std::invalid_argument("precomputed Gram must be square");
    for (int i = 0; i < K.rows(); ++i)
      for (int j = 0; j < i; ++j)
        if (std::abs(K(i, j) - K(j, i)) > 1e-10 * (1.0 + std::abs(K(i, j))))
          throw std::invalid_argument("precomputed Gram is not symmetric");
    KernelSpec s;
    s.kind = KernelKind::Precomputed;
    s.matrix = std::move(K);
    return s;
  }
};

inline const char* to_string(KernelKind k) {
  switch (k) {
    case KernelKind::Linear: return "linear";
    case KernelKind::Rbf: return "rbf";
    case KernelKind::Polynomial: return "polynomial";
    case KernelKind::Precomputed: return "precomputed";
  }
  return "?";
}

template <typename A, typename B>
double eval_kernel(const KernelSpec& spec, const Eigen::MatrixBase<A>& x,
                   const Eigen::MatrixBase<B>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("kernel arguments differ in dimension");
  switch (spec.kind) {
    case KernelKind::Linear:
      return x.dot(y);
    case KernelKind::Rbf:
      return std::exp(-spec.gamma * (x - y).squaredNorm());
    case KernelKind::Polynomial:
      return std::pow(spec.coef0 + x.dot(y), spec.degree);
    case KernelKind::Precomputed:
      throw std::invalid_argument("precomputed kernel cannot evaluate raw points");
  }
  return 0.0;
}

// Dense l x l Gram matrix. Upper triangle computed, lower mirrored, so the
// result is symmetric by construction.
inline Eigen::MatrixXd gram(const KernelSpec& spec, const Dataset& d) {
  const int l = d.l();
  if (spec.kind == KernelKind::Precomputed) {
    if (spec.matrix.rows() != l)
      throw std::invalid_argument("precomputed Gram size mismatch: got " +
                                  std::to_string(spec.matrix.rows()) + ", expected " +
                                  std::to_string(l));
    return spec.matrix;
  }
  Eigen::MatrixXd K(l, l);
  for (int i = 0; i < l; ++i)
    for (int j = i; j < l; ++j) {
      K(i, j) = eval_kernel(spec, d.x.row(i), d.x.row(j));
      K(j, i) = K(i, j);
    }
  return K;
}

// The explicit degree-3 feature map for 2-D inputs:
// <phi(x), phi(y)> = (1 + <x,y>)^3.
inline Eigen::VectorXd cubic_feature_map(const Eigen::Vector2d& x) {
  const double s3 = std::sqrt(3.0), s6 = std::sqrt(6.0);
  Eigen::VectorXd phi(10);
  phi << 1.0, s3 * x(0), s3 * x(1), s3 * x(0) * x(0), s3 * x(1) * x(1), s6 * x(0) * x(1),
      x(0) * x(0) * x(0), x(1) * x(1) * x(1), s3 * x(0) * x(1) * x(1), s3 * x(0) * x(0) * x(1);
  return phi;
}

// True when the kernel admits an explicit finite-dimensional feature map
// in this toolkit: linear (identity), or polynomial(3, 1) on 2-D inputs
// (the cubic map above).
inline bool has_explicit_features(const KernelSpec& spec, int dim) {
  if (spec.kind == KernelKind::Linear) return true;
  return spec.kind == KernelKind::Polynomial && spec.degree == 3 && spec.coef0 == 1.0 && dim == 2;
}

// phi(x) for kernels with an explicit map; throws otherwise.
inline Eigen::VectorXd feature_vector(const KernelSpec& spec, const Eigen::VectorXd& x) {
  if (spec.kind == KernelKind::Linear) return x;
  if (has_explicit_features(spec, static_cast<int>(x.size())))
    return cubic_feature_map(Eigen::Vector2d(x(0), x(1)));
  throw std::invalid_argument(std::string("kernel '") + to_string(spec.kind) +
                              "' has no explicit feature map");
}

// Rows are phi(x_i) for the explicit map; throws for kernels without one.
inline Eigen::MatrixXd feature_matrix(const KernelSpec& spec, const Dataset& d) {
  if (spec.kind == KernelKind::Linear) return d.x;
  if (has_explicit_features(spec, d.dim())) {
    Eigen::MatrixXd F(d.l(), 10);
    for (int i = 0; i < d.l(); ++i)
      F.row(i) = cubic_feature_map(Eigen::Vector2d(d.x(i, 0), d.x(i, 1))).transpose();
    return F;
  }
  throw std::invalid_argument(std::string("kernel '") + to_string(spec.kind) +
                              "' has no explicit feature map");
}

// Square Gram matrix from a CSV file (rows of comma-separated values).
inline Eigen::MatrixXd load_gram_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      double v;
      if (!detail::parse_double(field, v))
        throw DataError("parse error at row " + std::to_string(lineno) + " of " + path);
      vals.push_back(v);
    }
    if (!rows.empty() && vals.size() != rows.front().size())
      throw DataError("ragged Gram matrix at row " + std::to_string(lineno));
    rows.push_back(std::move(vals));
  }
  if (rows.empty() || rows.size() != rows.front().size())
    throw DataError("Gram matrix in " + path + " is not square");
  Eigen::MatrixXd K(rows.size(), rows.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows.size(); ++j) K(i, j) = rows[i][j];
  return K;
}

}  // namespace csslm
