#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include <json.hpp>

#include <csslm/errors.hpp>
#include <csslm/model.hpp>

namespace csslm {

namespace detail {

// JSON has no infinities; the uniqueness intervals use them as empty-set
// sentinels, so encode as strings and decode back.
inline nlohmann::json encode_real(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double decode_real(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw DataError("model JSON: unexpected numeric string \"" + s + "\"");
  }
  return j.get<double>();
}

inline KernelKind kernel_kind_from_string(const std::string& s) {
  if (s == "linear") return KernelKind::Linear;
  if (s == "rbf") return KernelKind::Rbf;
  if (s == "polynomial") return KernelKind::Polynomial;
  if (s == "precomputed") return KernelKind::Precomputed;
  throw DataError("model JSON: unknown kernel kind \"" + s + "\"");
}

inline RegimeKind regime_kind_from_string(const std::string& s) {
  if (s == "MainQP") return RegimeKind::MainQP;
  if (s == "DegenerateQP") return RegimeKind::DegenerateQP;
  if (s == "DegenerateLP") return RegimeKind::DegenerateLP;
  if (s == "TrivialClosedForm") return RegimeKind::TrivialClosedForm;
  if (s == "Unbounded") return RegimeKind::Unbounded;
  throw DataError("model JSON: unknown regime \"" + s + "\"");
}

}  // namespace detail

inline nlohmann::json model_to_json(const Model& mo) {
  using nlohmann::json;
  json j;
  j["version"] = 1;

  json jk;
  jk["kind"] = to_string(mo.kernel.kind);
  jk["gamma"] = mo.kernel.gamma;
  jk["degree"] = mo.kernel.degree;
  jk["coef0"] = mo.kernel.coef0;
  j["kernel"] = jk;

  j["hyper"] = {{"nu", mo.hyper.nu}, {"mu", mo.hyper.mu}, {"b", mo.hyper.b}};
  j["regime"] = {{"kind", to_string(mo.regime.kind)}, {"lambda", mo.regime.lambda}};

  json sp = json::array();
  for (size_t k = 0; k < mo.support_index.size(); ++k) {
    json row;
    row["index"] = mo.support_index[k];
    row["label"] = mo.support_y[k];
    row["beta"] = mo.support_beta(static_cast<int>(k));
    json feats = json::array();
    for (int c = 0; c < mo.support_x.cols(); ++c) feats.push_back(mo.support_x(k, c));
    row["features"] = feats;
    sp.push_back(row);
  }
  j["support_points"] = sp;

  if (mo.center.size() > 0) {
    json c = json::array();
    for (int i = 0; i < mo.center.size(); ++i) c.push_back(mo.center(i));
    j["center"] = c;
  }

  j["r"] = mo.r;
  j["t"] = mo.t;
  j["s"] = mo.s;
  j["beta_k_beta"] = mo.beta_k_beta;
  j["threshold_mode"] = to_string(mo.threshold);

  json diag;
  diag["objective"] = detail::encode_real(mo.dual.objective);
  diag["objective_g"] = detail::encode_real(mo.dual.objective_g);
  diag["kkt_max_residual"] = detail::encode_real(mo.kkt_max_residual);
  diag["iterations"] = mo.dual.iterations;
  diag["solver_residual"] = detail::encode_real(mo.dual.solver_residual);
  diag["l"] = mo.l;
  diag["m"] = mo.m;
  diag["n"] = mo.n;
  diag["dim"] = mo.dim;

  const UniquenessReport& u = mo.uniqueness;
  diag["uniqueness"] = {{"center_unique", u.center_unique},
                        {"radius_unique", u.radius_unique},
                        {"margin_unique", u.margin_unique},
                        {"r_lower", detail::encode_real(u.r_lower)},
                        {"r_upper", detail::encode_real(u.r_upper)},
                        {"q_lower", detail::encode_real(u.q_lower)},
                        {"q_upper", detail::encode_real(u.q_upper)},
                        {"free_positive_sv", u.free_positive_sv},
                        {"free_negative_sv", u.free_negative_sv},
                        {"clipped_at_zero", u.clipped_at_zero},
                        {"gamma_star", u.gamma_star}};

  json nu;
  nu["applicable"] = mo.nu.applicable;
  nu["note"] = mo.nu.note;
  nu["margin_errors_pos"] = mo.nu.margin_errors_pos;
  nu["margin_errors_neg"] = mo.nu.margin_errors_neg;
  nu["sv_pos"] = mo.nu.sv_pos;
  nu["sv_neg"] = mo.nu.sv_neg;
  nu["all_hold"] = mo.nu.all_hold;
  json rows = json::array();
  for (const auto& row : mo.nu.rows)
    rows.push_back({{"name", row.name},
                    {"lhs", detail::encode_real(row.lhs)},
                    {"rhs", detail::encode_real(row.rhs)},
                    {"holds", row.holds}});
  nu["rows"] = rows;
  diag["nu_report"] = nu;

  if (mo.regime.kind == RegimeKind::DegenerateLP && mo.dual.alpha.size() > 0) {
    json lpd = json::array();
    for (int i = 0; i < mo.dual.alpha.size(); ++i) lpd.push_back(mo.dual.alpha(i));
    diag["lp_dual"] = lpd;
  }

  j["diagnostics"] = diag;
  return j;
}

inline Model model_from_json(const nlohmann::json& j) {
  using nlohmann::json;
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw DataError("model JSON: unsupported or missing version (expected 1)");

  Model mo;
  const json& jk = j.at("kernel");
  mo.kernel.kind = detail::kernel_kind_from_string(jk.at("kind").get<std::string>());
  mo.kernel.gamma = jk.value("gamma", 1.0);
  mo.kernel.degree = jk.value("degree", 3);
  mo.kernel.coef0 = jk.value("coef0", 1.0);

  const json& jh = j.at("hyper");
  mo.hyper.nu = jh.at("nu").get<double>();
  mo.hyper.mu = jh.at("mu").get<double>();
  mo.hyper.b = jh.at("b").get<double>();

  const json& jr = j.at("regime");
  mo.regime.kind = detail::regime_kind_from_string(jr.at("kind").get<std::string>());
  mo.regime.lambda = jr.value("lambda", 0.0);

  const json& diag = j.at("diagnostics");
  mo.l = diag.at("l").get<int>();
  mo.m = diag.at("m").get<int>();
  mo.n = diag.at("n").get<int>();
  mo.dim = diag.at("dim").get<int>();

  const json& sp = j.at("support_points");
  const int ns = static_cast<int>(sp.size());
  mo.support_x.resize(ns, mo.dim);
  mo.support_y.resize(ns);
  mo.support_index.resize(ns);
  mo.support_beta.resize(ns);
  for (int k = 0; k < ns; ++k) {
    const json& row = sp[k];
    mo.support_index[k] = row.at("index").get<int>();
    mo.support_y[k] = row.at("label").get<int>();
    mo.support_beta(k) = row.at("beta").get<double>();
    const json& feats = row.at("features");
    if (static_cast<int>(feats.size()) != mo.dim)
      throw DataError("model JSON: support point " + std::to_string(k) +
                      " has wrong feature dimension");
    for (int c = 0; c < mo.dim; ++c) mo.support_x(k, c) = feats[c].get<double>();
  }

  if (j.contains("center")) {
    const json& c = j["center"];
    mo.center.resize(c.size());
    for (size_t i = 0; i < c.size(); ++i) mo.center(static_cast<int>(i)) = c[i].get<double>();
  }

  mo.r = j.at("r").get<double>();
  mo.t = j.at("t").get<double>();
  mo.s = j.at("s").get<double>();
  mo.beta_k_beta = j.at("beta_k_beta").get<double>();
  mo.threshold = threshold_from_string(j.at("threshold_mode").get<std::string>());

  mo.dual.objective = detail::decode_real(diag.at("objective"));
  mo.dual.objective_g = detail::decode_real(diag.at("objective_g"));
  mo.kkt_max_residual = detail::decode_real(diag.at("kkt_max_residual"));
  mo.dual.iterations = diag.value("iterations", 0);
  mo.dual.solver_residual = detail::decode_real(diag.value("solver_residual", json(0.0)));
  if (diag.contains("lp_dual")) {
    const json& lpd = diag["lp_dual"];
    mo.dual.alpha.resize(lpd.size());
    for (size_t i = 0; i < lpd.size(); ++i)
      mo.dual.alpha(static_cast<int>(i)) = lpd[i].get<double>();
  }

  const json& u = diag.at("uniqueness");
  mo.uniqueness.center_unique = u.at("center_unique").get<bool>();
  mo.uniqueness.radius_unique = u.at("radius_unique").get<bool>();
  mo.uniqueness.margin_unique = u.at("margin_unique").get<bool>();
  mo.uniqueness.r_lower = detail::decode_real(u.at("r_lower"));
  mo.uniqueness.r_upper = detail::decode_real(u.at("r_upper"));
  mo.uniqueness.q_lower = detail::decode_real(u.at("q_lower"));
  mo.uniqueness.q_upper = detail::decode_real(u.at("q_upper"));
  mo.uniqueness.free_positive_sv = u.value("free_positive_sv", -1);
  mo.uniqueness.free_negative_sv = u.value("free_negative_sv", -1);
  mo.uniqueness.clipped_at_zero = u.value("clipped_at_zero", false);
  mo.uniqueness.gamma_star = u.value("gamma_star", std::string());

  const json& nu = diag.at("nu_report");
  mo.nu.applicable = nu.at("applicable").get<bool>();
  mo.nu.note = nu.value("note", std::string());
  mo.nu.margin_errors_pos = nu.value("margin_errors_pos", 0);
  mo.nu.margin_errors_neg = nu.value("margin_errors_neg", 0);
  mo.nu.sv_pos = nu.value("sv_pos", 0);
  mo.nu.sv_neg = nu.value("sv_neg", 0);
  mo.nu.all_hold = nu.value("all_hold", false);
  for (const auto& row : nu.at("rows"))
    mo.nu.rows.push_back({row.at("name").get<std::string>(), detail::decode_real(row.at("lhs")),
                          detail::decode_real(row.at("rhs")), row.at("holds").get<bool>()});
  return mo;
}

inline void save_model(const Model& mo, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open \"" + path + "\" for writing");
  out << model_to_json(mo).dump(2) << "\n";
  if (!out) throw DataError("failed writing model to \"" + path + "\"");
}

inline Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file \"" + path + "\"");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("model JSON parse error in \"" + path + "\": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace csslm
