#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace csslm {

// minimize 1/2 x'Qx + c'x + constant
// subject to A x = b, G x <= h, lo <= x <= hi
struct QpProblem {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  Eigen::VectorXd lo, hi;
  double constant = 0.0;

  explicit QpProblem(int n = 0)
      : Q(Eigen::MatrixXd::Zero(n, n)),
        c(Eigen::VectorXd::Zero(n)),
        A(0, n),
        b(0),
        G(0, n),
        h(0),
        lo(Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity())),
        hi(Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity())) {}

  int n() const { return static_cast<int>(c.size()); }

  void validate() const {
    const int nx = n();
    if (Q.rows() != nx || Q.cols() != nx) throw std::invalid_argument("Q dimension mismatch");
    if (A.cols() != nx || A.rows() != b.size()) throw std::invalid_argument("A/b dimension mismatch");
    if (G.cols() != nx || G.rows() != h.size()) throw std::invalid_argument("G/h dimension mismatch");
    if (lo.size() != nx || hi.size() != nx) throw std::invalid_argument("box dimension mismatch");
    for (int i = 0; i < nx; ++i)
      if (!(lo(i) <= hi(i))) throw std::invalid_argument("box has lo > hi");
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < i; ++j)
        if (std::abs(Q(i, j) - Q(j, i)) > 1e-12 * (1.0 + std::abs(Q(i, j))))
          throw std::invalid_argument("Q is not symmetric");
    if (nx > 0 && Q.lpNorm<Eigen::Infinity>() > 0.0) {
      // PSD within tolerance: Q + eps*I must admit a Cholesky factorization.
      const double eps = 1e-8 * (1.0 + Q.lpNorm<Eigen::Infinity>());
      Eigen::LLT<Eigen::MatrixXd> llt(Q + eps * Eigen::MatrixXd::Identity(nx, nx));
      if (llt.info() != Eigen::Success)
        throw std::invalid_argument("Q is not positive semidefinite");
    }
  }
};

enum class QpStatus { Optimal, Infeasible, Unbounded, MaxIter };

inline const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal: return "Optimal";
    case QpStatus::Infeasible: return "Infeasible";
    case QpStatus::Unbounded: return "Unbounded";
    case QpStatus::MaxIter: return "MaxIter";
  }
  return "?";
}

struct QpSolution {
  QpStatus status = QpStatus::MaxIter;
  Eigen::VectorXd x;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double dual_objective = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd y;       // equality multipliers
  Eigen::VectorXd z_ineq;  // multipliers for G rows (>= 0)
  Eigen::VectorXd z_lo, z_hi;  // multipliers for active bounds (>= 0)
  int iterations = 0;
  double kkt_residual = std::numeric_limits<double>::quiet_NaN();
};

struct QpOptions {
  double tol = 1e-9;
  int max_iter = 200;
  double divergence = 1e10;
  std::ostream* log = nullptr;  // per-iteration log when set
};

namespace detail {

// LDL' factorization without pivoting, for the quasidefinite KKT matrix
// (positive diagonal block first, negative blocks after). L is unit lower
// triangular, stored strictly below the diagonal of M; D returned apart.
inline void ldlt_factor(Eigen::MatrixXd& M, Eigen::VectorXd& D, int positive_rows) {
  const int q = static_cast<int>(M.rows());
  D.resize(q);
  Eigen::VectorXd w(q);
  for (int j = 0; j < q; ++j) {
    w.head(j) = M.row(j).head(j).transpose().cwiseProduct(D.head(j));
    double dj = M(j, j);
    if (j > 0) dj -= M.row(j).head(j).dot(w.head(j));
    if (dj == 0.0) dj = j < positive_rows ? 1e-10 : -1e-10;
    D(j) = dj;
    const int rest = q - j - 1;
    if (rest > 0) {
      if (j > 0)
        M.col(j).tail(rest).noalias() -= M.bottomLeftCorner(rest, j) * w.head(j);
      M.col(j).tail(rest) /= dj;
    }
  }
}

inline void ldlt_solve(const Eigen::MatrixXd& M, const Eigen::VectorXd& D, Eigen::VectorXd& rhs) {
  const int q = static_cast<int>(M.rows());
  for (int j = 0; j < q - 1; ++j)
    rhs.tail(q - j - 1).noalias() -= rhs(j) * M.col(j).tail(q - j - 1);
  rhs.array() /= D.array();
  for (int j = q - 2; j >= 0; --j) rhs(j) -= M.col(j).tail(q - j - 1).dot(rhs.tail(q - j - 1));
}

inline double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double a = std::numeric_limits<double>::infinity();
  for (int i = 0; i < v.size(); ++i)
    if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
  return a;
}

}  // namespace detail

// Primal-dual interior-point method with Mehrotra predictor-corrector.
// Deterministic: fixed initialization, no randomness, so identical inputs
// produce bit-identical iterate sequences. Infeasible/unbounded outcomes
// are detected heuristically from iterate divergence.
inline QpSolution solve_qp(const QpProblem& prob, const QpOptions& opt = {}) {
  prob.validate();
  const double inf = std::numeric_limits<double>::infinity();
  const double delta = 1e-10;  // static regularization on the KKT diagonal
  const int nx = prob.n();
  const int np = static_cast<int>(prob.A.rows());
  const int mg = static_cast<int>(prob.G.rows());

  QpSolution sol;

  // No variables: a pure feasibility question.
  if (nx == 0) {
    const bool feasible = (np == 0 || prob.b.lpNorm<Eigen::Infinity>() <= opt.tol) &&
                          (mg == 0 || prob.h.minCoeff() >= -opt.tol);
    sol.status = feasible ? QpStatus::Optimal : QpStatus::Infeasible;
    sol.objective = sol.dual_objective = prob.constant;
    sol.kkt_residual = 0.0;
    return sol;
  }

  // Fold the box into the inequality system: rows are G, then x_i <= hi_i,
  // then -x_i <= -lo_i for the finite bounds.
  std::vector<int> hi_idx, lo_idx;
  for (int i = 0; i < nx; ++i) {
    if (prob.hi(i) < inf) hi_idx.push_back(i);
    if (prob.lo(i) > -inf) lo_idx.push_back(i);
  }
  const int mc = mg + static_cast<int>(hi_idx.size() + lo_idx.size());
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(mc, nx);
  Eigen::VectorXd d(mc);
  C.topRows(mg) = prob.G;
  d.head(mg) = prob.h;
  for (size_t k = 0; k < hi_idx.size(); ++k) {
    C(mg + static_cast<int>(k), hi_idx[k]) = 1.0;
    d(mg + static_cast<int>(k)) = prob.hi(hi_idx[k]);
  }
  const int lo_base = mg + static_cast<int>(hi_idx.size());
  for (size_t k = 0; k < lo_idx.size(); ++k) {
    C(lo_base + static_cast<int>(k), lo_idx[k]) = -1.0;
    d(lo_base + static_cast<int>(k)) = -prob.lo(lo_idx[k]);
  }

  const double cs = 1.0 + prob.c.lpNorm<Eigen::Infinity>();
  const double bs = 1.0 + (np > 0 ? prob.b.lpNorm<Eigen::Infinity>() : 0.0);
  const double ds = 1.0 + (mc > 0 ? d.lpNorm<Eigen::Infinity>() : 0.0);

  const int q = nx + np + mc;
  Eigen::MatrixXd Mexact = Eigen::MatrixXd::Zero(q, q);
  Mexact.topLeftCorner(nx, nx) = prob.Q;
  if (np > 0) {
    Mexact.block(nx, 0, np, nx) = prob.A;
    Mexact.block(0, nx, nx, np) = prob.A.transpose();
  }
  if (mc > 0) {
    Mexact.block(nx + np, 0, mc, nx) = C;
    Mexact.block(0, nx + np, nx, mc) = C.transpose();
  }

  auto objective = [&](const Eigen::VectorXd& x) {
    return 0.5 * x.dot(prob.Q * x) + prob.c.dot(x) + prob.constant;
  };

  // No inequalities at all: one KKT solve decides everything.
  if (mc == 0) {
    Eigen::MatrixXd M = Mexact;
    M.topLeftCorner(nx, nx).diagonal().array() += delta;
    M.bottomRightCorner(np, np).diagonal().array() -= delta;
    Eigen::VectorXd D, rhs(q);
    rhs.head(nx) = -prob.c;
    rhs.tail(np) = prob.b;
    detail::ldlt_factor(M, D, nx);
    Eigen::VectorXd v = rhs;
    detail::ldlt_solve(M, D, v);
    Eigen::VectorXd resid = rhs - Mexact * v;
    detail::ldlt_solve(M, D, resid);
    v += resid;
    sol.x = v.head(nx);
    sol.y = v.tail(np);
    const double rel_d = (prob.Q * sol.x + prob.c +
                          (np > 0 ? Eigen::VectorXd(prob.A.transpose() * sol.y)
                                  : Eigen::VectorXd::Zero(nx)))
                             .lpNorm<Eigen::Infinity>() / cs;
    const double rel_p = np > 0 ? (prob.A * sol.x - prob.b).lpNorm<Eigen::Infinity>() / bs : 0.0;
    sol.kkt_residual = std::max(rel_d, rel_p);
    sol.iterations = 1;
    sol.objective = objective(sol.x);
    sol.dual_objective = sol.objective;
    if (rel_p > std::sqrt(opt.tol))
      sol.status = QpStatus::Infeasible;
    else if (rel_d > std::sqrt(opt.tol))
      sol.status = QpStatus::Unbounded;
    else
      sol.status = QpStatus::Optimal;
    return sol;
  }

  // Starting point: box midpoint (or a unit inside the finite bound), unit
  // multipliers, slacks at least 1.
  Eigen::VectorXd x(nx);
  for (int i = 0; i < nx; ++i) {
    const bool has_lo = prob.lo(i) > -inf, has_hi = prob.hi(i) < inf;
    if (has_lo && has_hi) x(i) = 0.5 * (prob.lo(i) + prob.hi(i));
    else if (has_lo) x(i) = prob.lo(i) + 1.0;
    else if (has_hi) x(i) = prob.hi(i) - 1.0;
    else x(i) = 0.0;
  }
  Eigen::VectorXd s = (d - C * x).cwiseAbs().cwiseMax(1.0);
  Eigen::VectorXd z = Eigen::VectorXd::Ones(mc);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(np);

  Eigen::VectorXd D, rd(nx), rp(np), ri(mc);
  Eigen::MatrixXd M(q, q);
  int stalls = 0;

  for (int it = 0; it < opt.max_iter; ++it) {
    rd = prob.Q * x + prob.c + C.transpose() * z;
    if (np > 0) rd.noalias() += prob.A.transpose() * y;
    if (np > 0) rp = prob.A * x - prob.b;
    ri = C * x + s - d;
    const double gap = s.dot(z) / mc;
    const double obj = objective(x);

    // Scaled by |Qx| rather than |x|: dividing by the iterate norm would
    // mask the persistent dual residual of an unbounded problem, where x
    // runs off along a ray while c + C'z never closes.
    const double rel_d =
        rd.lpNorm<Eigen::Infinity>() / (cs + (prob.Q * x).lpNorm<Eigen::Infinity>());
    const double rel_p = np > 0 ? rp.lpNorm<Eigen::Infinity>() / bs : 0.0;
    const double rel_i = ri.lpNorm<Eigen::Infinity>() / ds;
    const double rel_g = gap / (1.0 + std::abs(obj));
    sol.kkt_residual = std::max({rel_d, rel_p, rel_i, rel_g});
    sol.iterations = it;
    if (opt.log)
      *opt.log << "it " << it << " obj " << obj << " gap " << gap << " rd " << rel_d
               << " rp " << std::max(rel_p, rel_i) << '\n';

    if (sol.kkt_residual <= opt.tol) {
      sol.status = QpStatus::Optimal;
      break;
    }

    const double xn = x.lpNorm<Eigen::Infinity>();
    const double dn = std::max(z.lpNorm<Eigen::Infinity>(),
                               np > 0 ? y.lpNorm<Eigen::Infinity>() : 0.0);
    if (xn > opt.divergence) {
      const double feas = (ri.lpNorm<Eigen::Infinity>() +
                           (np > 0 ? rp.lpNorm<Eigen::Infinity>() : 0.0)) / (1.0 + xn);
      sol.status = feas < 1e-6 ? QpStatus::Unbounded : QpStatus::Infeasible;
      break;
    }
    if (dn > opt.divergence) {
      sol.status = QpStatus::Infeasible;
      break;
    }

    M = Mexact;
    M.topLeftCorner(nx, nx).diagonal().array() += delta;
    if (np > 0) M.block(nx, nx, np, np).diagonal().array() -= delta;
    for (int j = 0; j < mc; ++j) M(nx + np + j, nx + np + j) = -(s(j) / z(j) + delta);
    Eigen::MatrixXd Mexact_it = M;  // exact apart from the static delta
    detail::ldlt_factor(M, D, nx);

    auto kkt_solve = [&](Eigen::VectorXd rhs) {
      Eigen::VectorXd v = rhs;
      detail::ldlt_solve(M, D, v);
      Eigen::VectorXd resid = rhs - Mexact_it * v;
      detail::ldlt_solve(M, D, resid);
      v += resid;
      return v;
    };

    // Predictor (affine scaling direction).
    Eigen::VectorXd rhs(q);
    rhs.head(nx) = -rd;
    if (np > 0) rhs.segment(nx, np) = -rp;
    rhs.tail(mc) = -ri + s;
    Eigen::VectorXd v = kkt_solve(rhs);
    Eigen::VectorXd dx = v.head(nx);
    Eigen::VectorXd dz = v.tail(mc);
    Eigen::VectorXd dsv = -ri - C * dx;

    const double ap_aff = std::min(1.0, detail::max_step(s, dsv));
    const double ad_aff = std::min(1.0, detail::max_step(z, dz));
    const double mu_aff = (s + ap_aff * dsv).dot(z + ad_aff * dz) / mc;
    double sigma = std::pow(mu_aff / gap, 3);
    sigma = std::clamp(sigma, 1e-12, 1.0 - 1e-6);

    // Corrector with the Mehrotra cross term.
    rhs.tail(mc) = -ri + s + (dsv.cwiseProduct(dz).array() - sigma * gap).matrix().cwiseQuotient(z);
    v = kkt_solve(rhs);
    dx = v.head(nx);
    dz = v.tail(mc);
    dsv = -ri - C * dx;

    const double tau = 0.995;
    const double ap = std::min(1.0, tau * detail::max_step(s, dsv));
    const double ad = std::min(1.0, tau * detail::max_step(z, dz));
    x += ap * dx;
    s += ap * dsv;
    z += ad * dz;
    if (np > 0) y += ad * v.segment(nx, np);

    if (ap < 1e-10 && ad < 1e-10) {
      if (++stalls >= 3) {
        const double feas = std::max(rel_p, rel_i);
        sol.status = feas > std::sqrt(opt.tol) ? QpStatus::Infeasible : QpStatus::MaxIter;
        break;
      }
    } else {
      stalls = 0;
    }
  }

  sol.x = x;
  sol.y = y;
  sol.z_ineq = z.head(mg);
  sol.z_hi = Eigen::VectorXd::Zero(nx);
  sol.z_lo = Eigen::VectorXd::Zero(nx);
  for (size_t k = 0; k < hi_idx.size(); ++k) sol.z_hi(hi_idx[k]) = z(mg + static_cast<int>(k));
  for (size_t k = 0; k < lo_idx.size(); ++k) sol.z_lo(lo_idx[k]) = z(lo_base + static_cast<int>(k));
  sol.objective = objective(x);
  sol.dual_objective = -0.5 * x.dot(prob.Q * x) - (np > 0 ? prob.b.dot(y) : 0.0) - d.dot(z) +
                       prob.constant;
  return sol;
}

// Plain-text dump (dimensions plus dense blocks) for external cross-checks.
inline void dump_problem(const QpProblem& p, std::ostream& os) {
  os.precision(17);
  os << "n " << p.n() << " eq " << p.A.rows() << " ineq " << p.G.rows() << '\n';
  os << "Q\n" << p.Q << "\nc\n" << p.c.transpose() << '\n';
  if (p.A.rows() > 0) os << "A\n" << p.A << "\nb\n" << p.b.transpose() << '\n';
  if (p.G.rows() > 0) os << "G\n" << p.G << "\nh\n" << p.h.transpose() << '\n';
  os << "lo\n" << p.lo.transpose() << "\nhi\n" << p.hi.transpose() << '\n';
  os << "constant " << p.constant << '\n';
}

}  // namespace csslm
