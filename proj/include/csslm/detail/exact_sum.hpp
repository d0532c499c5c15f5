#pragma once

#include <cmath>
#include <initializer_list>

namespace csslm::detail {

// Error-free transformations. two_sum and two_prod split a float operation
// into result + exact roundoff, so a short sum of products can be signed
// without any rounding ambiguity (Shewchuk's expansion arithmetic).

inline void two_sum(double a, double b, double& s, double& err) {
  s = a + b;
  const double bv = s - a;
  err = (a - (s - bv)) + (b - bv);
}

inline void two_prod(double a, double b, double& p, double& err) {
  p = a * b;
  err = std::fma(a, b, -p);
}

// Sign of an exact sum of doubles. Terms are folded into a nonoverlapping
// expansion (components in increasing magnitude order); the sign of the
// largest nonzero component is the sign of the exact sum.
inline int exact_sign(std::initializer_list<double> terms) {
  double e[32];
  int len = 0;
  for (double t : terms) {
    double out[32];
    int outlen = 0;
    double q = t;
    for (int i = 0; i < len; ++i) {
      double s, err;
      two_sum(q, e[i], s, err);
      out[outlen++] = err;
      q = s;
    }
    out[outlen++] = q;
    for (int i = 0; i < outlen; ++i) e[i] = out[i];
    len = outlen;
  }
  for (int i = len - 1; i >= 0; --i) {
    if (e[i] > 0.0) return 1;
    if (e[i] < 0.0) return -1;
  }
  return 0;
}

// Sign of x*w - rhs, exact. x, w, rhs are arbitrary finite doubles.
inline int exact_sign_prod_minus(double x, double w, double rhs) {
  double p, err;
  two_prod(x, w, p, err);
  return exact_sign({p, err, -rhs});
}

}  // namespace csslm::detail
