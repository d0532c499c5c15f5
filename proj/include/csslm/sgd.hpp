#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <random>

#include <Eigen/Dense>

#include <csslm/dataset.hpp>
#include <csslm/errors.hpp>
#include <csslm/kernel.hpp>
#include <csslm/model.hpp>
#include <csslm/objective.hpp>
#include <csslm/regime.hpp>

namespace csslm {

enum class SgdVariant { Plain, Revisit };

struct SgdConfig {
  long long iterations = 200000;
  SgdVariant variant = SgdVariant::Plain;
  std::uint64_t seed = 0;
  bool averaging = true;  // average the last K/2 iterates
  long long log_interval = 0;
  std::ostream* log = nullptr;
};

struct SgdState {
  Eigen::VectorXd a;
  double s = 0.0;
  double t = 0.0;
  long long k = 1;
};

namespace detail {

// Uniform index in [0, l) by rejection from the raw 64-bit stream, so the
// sequence is identical on every platform (std::uniform_int_distribution
// is implementation-defined).
inline int uniform_index(std::mt19937_64& rng, int l) {
  const std::uint64_t range = static_cast<std::uint64_t>(l);
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return static_cast<int>(v % range);
}

}  // namespace detail

// One Algorithm-1 step. The loss indicators are evaluated at the pre-update
// state (a_k, s_k, t_k) even though the decay is applied first.
inline void sgd_step(SgdState& st, const Eigen::VectorXd& x, int y, const HyperParams& p,
                     SgdVariant variant) {
  const double eta = 1.0 / (p.nu * st.k);
  const Eigen::VectorXd a_old = st.a;
  const double s_old = st.s, t_old = st.t;

  st.a *= 1.0 - eta * p.nu;
  if (variant == SgdVariant::Plain) {
    st.s += 0.5 * eta * p.nu;
    st.t += 0.5 * eta * p.mu;
  } else {
    st.s = (1.0 - eta * p.nu) * st.s + 0.5 * eta * p.nu;
    st.t = (1.0 - eta * p.nu) * st.t + 0.5 * eta * p.mu;
  }

  const double mid = 0.5 * (x.squaredNorm() + s_old);
  if (y == 1 && a_old.dot(x) < mid) {
    st.a += eta * x;
    st.s -= 0.5 * eta;
  } else if (y == -1 && a_old.dot(x) > mid - 0.5 * t_old) {
    st.a -= p.b * eta * x;
    st.s += 0.5 * p.b * eta;
    st.t -= 0.5 * p.b * eta;
    if (st.t < 0.0) st.t = 0.0;
  }
  ++st.k;
}

inline Model pegasos_train(const Dataset& d, const HyperParams& p, const SgdConfig& cfg) {
  if (cfg.iterations < 1) throw std::invalid_argument("sgd: iterations must be >= 1");
  p.validate();
  const int l = d.l();
  const Regime reg = classify_regime(p, d.m, d.n);
  if (reg.kind == RegimeKind::Unbounded)
    throw UnboundedError(describe_regime(reg, p, d.m, d.n));
  if (cfg.log && reg.kind != RegimeKind::MainQP)
    *cfg.log << "sgd: regime is " << to_string(reg.kind)
             << "; the stochastic solver targets the MainQP objective\n";

  std::mt19937_64 rng(cfg.seed);
  SgdState st;
  st.a = Eigen::VectorXd::Zero(d.dim());

  Eigen::VectorXd a_sum = Eigen::VectorXd::Zero(d.dim());
  double s_sum = 0.0, t_sum = 0.0;
  long long tail_count = 0;
  const long long tail_start = cfg.iterations - cfg.iterations / 2;  // steps k > K/2

  for (long long k = 1; k <= cfg.iterations; ++k) {
    const int i = detail::uniform_index(rng, l);
    sgd_step(st, d.x.row(i).transpose(), d.y[i], p, cfg.variant);
    if (cfg.averaging && k >= tail_start) {
      a_sum += st.a;
      s_sum += st.s;
      t_sum += st.t;
      ++tail_count;
    }
    if (cfg.log && cfg.log_interval > 0 && k % cfg.log_interval == 0)
      *cfg.log << "sgd: k=" << k << " f=" << eval_f(d.x, d.m, p, st.a, st.s, st.t) << "\n";
  }

  Eigen::VectorXd a = st.a;
  double s = st.s, t = st.t;
  if (cfg.averaging && tail_count > 0) {
    a = a_sum / tail_count;
    s = s_sum / tail_count;
    t = std::max(t_sum / tail_count, 0.0);
  }

  Model mo;
  mo.kernel = KernelSpec::linear();
  mo.hyper = p;
  mo.regime = reg;
  mo.l = l;
  mo.m = d.m;
  mo.n = d.n;
  mo.dim = d.dim();
  mo.center = a;
  mo.beta_k_beta = a.squaredNorm();
  mo.r = std::max(mo.beta_k_beta - s, 0.0);
  mo.t = t;
  mo.s = mo.beta_k_beta - mo.r;
  mo.dual.objective_g = eval_f(d.x, d.m, p, a, s, t);
  mo.dual.objective = l * mo.dual.objective_g;
  mo.dual.iterations = static_cast<int>(std::min<long long>(cfg.iterations,
                                                            std::numeric_limits<int>::max()));
  mo.uniqueness.center_unique = false;
  mo.uniqueness.radius_unique = false;
  mo.uniqueness.margin_unique = false;
  mo.uniqueness.r_lower = mo.r;
  mo.uniqueness.r_upper = mo.r;
  mo.uniqueness.q_lower = mo.r + mo.t;
  mo.uniqueness.q_upper = mo.r + mo.t;
  mo.uniqueness.gamma_star = "stochastic solution: no optimality or uniqueness certificate";
  mo.nu.applicable = false;
  mo.nu.note = "nu-property needs dual multipliers; stochastic models carry none";
  return mo;
}

}  // namespace csslm
