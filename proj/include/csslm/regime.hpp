#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include <csslm/detail/exact_sum.hpp>

namespace csslm {

struct HyperParams {
  double nu = 0.5;  // volume/loss trade-off, > 0
  double mu = 0.0;  // volume/margin trade-off, >= 0
  double b = 1.0;   // negative-loss weight, >= 1

  void validate() const {
    if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("nu must be > 0");
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu must be >= 0");
    if (!(b >= 1.0) || !std::isfinite(b)) throw std::invalid_argument("b must be >= 1");
  }
};

enum class RegimeKind { Unbounded, MainQP, DegenerateQP, DegenerateLP, TrivialClosedForm };

inline const char* to_string(RegimeKind k) {
  switch (k) {
    case RegimeKind::Unbounded: return "Unbounded";
    case RegimeKind::MainQP: return "MainQP";
    case RegimeKind::DegenerateQP: return "DegenerateQP";
    case RegimeKind::DegenerateLP: return "DegenerateLP";
    case RegimeKind::TrivialClosedForm: return "TrivialClosedForm";
  }
  return "?";
}

struct Regime {
  RegimeKind kind = RegimeKind::MainQP;
  double lambda = 0.0;        // m/l - mu, carried for DegenerateQP
  bool mu_exceeds_m = false;  // Unbounded because mu > m/l
  bool mu_exceeds_bn = false; // Unbounded because mu > b*n/l
};

// Decision tree over (nu, mu, b, m, n):
//   mu > min{m/l, b n/l}      -> Unbounded (objective has no finite minimum)
//   nu + mu < m/l             -> MainQP
//   mu = 0                    -> TrivialClosedForm
//   mu < m/l                  -> DegenerateQP with lambda = m/l - mu
//   mu = m/l                  -> DegenerateLP
// The boundaries compare products of exactly-representable doubles, so the
// signs are computed with error-free float transformations: no tolerance,
// no misclassification at equality.
inline Regime classify_regime(const HyperParams& p, int m, int n) {
  p.validate();
  if (m < 1) throw std::invalid_argument("need m >= 1 positive examples");
  if (n < 0) throw std::invalid_argument("negative count n must be >= 0");
  const double l = m + n;

  // sign(mu*l - m) and sign(mu*l - b*n)
  const int over_m = detail::exact_sign_prod_minus(p.mu, l, m);
  double bn, bn_err;
  detail::two_prod(p.b, n, bn, bn_err);
  double mul, mul_err;
  detail::two_prod(p.mu, l, mul, mul_err);
  const int over_bn = detail::exact_sign({mul, mul_err, -bn, -bn_err});

  if (over_m > 0 || over_bn > 0) {
    Regime r;
    r.kind = RegimeKind::Unbounded;
    r.mu_exceeds_m = over_m > 0;
    r.mu_exceeds_bn = over_bn > 0;
    return r;
  }

  // sign(nu*l + mu*l - m)
  double nul, nul_err;
  detail::two_prod(p.nu, l, nul, nul_err);
  if (detail::exact_sign({nul, nul_err, mul, mul_err, -static_cast<double>(m)}) < 0)
    return {RegimeKind::MainQP, 0.0, false, false};

  if (p.mu == 0.0) return {RegimeKind::TrivialClosedForm, 0.0, false, false};
  if (over_m < 0) return {RegimeKind::DegenerateQP, m / l - p.mu, false, false};
  return {RegimeKind::DegenerateLP, 0.0, false, false};
}

// One-line explanation for CLI output and error messages.
inline std::string describe_regime(const Regime& r, const HyperParams& p, int m, int n) {
  const double l = m + n;
  char buf[256];
  switch (r.kind) {
    case RegimeKind::Unbounded:
      std::snprintf(buf, sizeof buf,
                    "Unbounded: mu = %.9g exceeds %s (objective decreases along a ray; "
                    "require mu <= min{m/l, b*n/l} = %.9g)",
                    p.mu, r.mu_exceeds_m ? "m/l" : "b*n/l",
                    std::fmin(m / l, p.b * n / l));
      break;
    case RegimeKind::MainQP:
      std::snprintf(buf, sizeof buf, "MainQP: nu + mu = %.9g < m/l = %.9g", p.nu + p.mu, m / l);
      break;
    case RegimeKind::DegenerateQP:
      std::snprintf(buf, sizeof buf,
                    "DegenerateQP: nu + mu >= m/l and 0 < mu < m/l, lambda = %.9g", r.lambda);
      break;
    case RegimeKind::DegenerateLP:
      std::snprintf(buf, sizeof buf, "DegenerateLP: mu = m/l = %.9g", m / l);
      break;
    case RegimeKind::TrivialClosedForm:
      std::snprintf(buf, sizeof buf, "TrivialClosedForm: mu = 0 and nu = %.9g >= m/l = %.9g",
                    p.nu, m / l);
      break;
  }
  return buf;
}

}  // namespace csslm
