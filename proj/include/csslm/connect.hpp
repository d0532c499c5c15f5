#pragma once

#include <cmath>
#include <stdexcept>

#include <csslm/model.hpp>

namespace csslm {

// Parameter and solution map onto the SSLM formulation: the trained sphere
// is globally optimal for SSLM with parameters (nu_bar, nu1_bar, nu2_bar),
// radius R = sqrt(r) and margin rho = sqrt(t).
struct SslmView {
  double nu_bar = 0.0;
  double nu1_bar = 0.0;
  double nu2_bar = 0.0;
  double R = 0.0;
  double rho = 0.0;
};

inline SslmView to_sslm(const Model& mo) {
  if (mo.n == 0)
    throw std::invalid_argument("to_sslm: nu2_bar = l nu / (n b) is undefined without negatives");
  SslmView v;
  v.nu_bar = mo.hyper.mu / mo.hyper.nu;
  v.nu1_bar = mo.l * mo.hyper.nu / mo.m;
  v.nu2_bar = mo.l * mo.hyper.nu / (mo.n * mo.hyper.b);
  v.R = std::sqrt(std::max(mo.r, 0.0));
  v.rho = std::sqrt(std::max(mo.t, 0.0));
  return v;
}

// SVDD correspondence for mu = 0: the sphere solves SVDD with weights
// C = 1/(nu l) on positives and D = b/(nu l) on negatives.
struct SvddView {
  double C = 0.0;
  double D = 0.0;
  double R = 0.0;
};

inline SvddView to_svdd(const Model& mo) {
  if (mo.hyper.mu > 0.0)
    throw std::invalid_argument("to_svdd: the SVDD correspondence requires mu = 0");
  SvddView v;
  v.C = 1.0 / (mo.hyper.nu * mo.l);
  v.D = mo.hyper.b / (mo.hyper.nu * mo.l);
  v.R = std::sqrt(std::max(mo.r, 0.0));
  return v;
}

}  // namespace csslm
