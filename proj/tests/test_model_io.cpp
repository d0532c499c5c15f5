#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include <csslm/csslm.hpp>
#include <json.hpp>

#include "fixtures.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
using Catch::Matchers::WithinAbs;
using csslm::KernelSpec;
using csslm::RegimeKind;
using csslm::ThresholdMode;

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("rbf model predictions survive a save and load bitwise") {
  const auto d = fixtures::symmetric4();
  const auto mo =
      csslm::train(d, KernelSpec::rbf(0.7), fixtures::symmetric4_params());

  fixtures::TempDir tmp;
  const auto path = tmp.file("rbf.json");
  csslm::save_model(mo, path);
  const auto back = csslm::load_model(path);

  CHECK(back.kernel.kind == csslm::KernelKind::Rbf);
  CHECK(back.kernel.gamma == mo.kernel.gamma);
  CHECK(back.r == mo.r);
  CHECK(back.t == mo.t);
  CHECK(back.s == mo.s);
  CHECK(back.beta_k_beta == mo.beta_k_beta);
  CHECK(back.threshold_value() == mo.threshold_value());
  REQUIRE(back.support_beta.size() == mo.support_beta.size());
  for (Eigen::Index i = 0; i < mo.support_beta.size(); ++i)
    CHECK(back.support_beta(i) == mo.support_beta(i));

  for (double x1 = -2.0; x1 <= 2.0; x1 += 0.5)
    for (double x2 = -2.0; x2 <= 2.0; x2 += 0.5) {
      const Eigen::Vector2d z(x1, x2);
      const auto p0 = csslm::predict_point(mo, z);
      const auto p1 = csslm::predict_point(back, z);
      CHECK(p1.score == p0.score);
      CHECK(p1.label == p0.label);
    }
}

TEST_CASE("every reported field is preserved through the json round trip") {
  csslm::TrainOptions opts;
  opts.threshold = ThresholdMode::Outer;
  const auto mo = csslm::train(fixtures::symmetric4(), KernelSpec::linear(),
                               fixtures::symmetric4_params(), opts);

  fixtures::TempDir tmp;
  const auto path = tmp.file("full.json");
  csslm::save_model(mo, path);
  const auto back = csslm::load_model(path);

  CHECK(back.hyper.nu == mo.hyper.nu);
  CHECK(back.hyper.mu == mo.hyper.mu);
  CHECK(back.hyper.b == mo.hyper.b);
  CHECK(back.regime.kind == RegimeKind::MainQP);
  CHECK(back.regime.lambda == mo.regime.lambda);
  CHECK(back.threshold == ThresholdMode::Outer);
  CHECK(back.l == mo.l);
  CHECK(back.m == mo.m);
  CHECK(back.n == mo.n);
  CHECK(back.dim == mo.dim);
  CHECK(back.dual.objective == mo.dual.objective);
  CHECK(back.dual.objective_g == mo.dual.objective_g);
  CHECK(back.kkt_max_residual == mo.kkt_max_residual);
  CHECK(back.dual.iterations == mo.dual.iterations);

  const auto& u0 = mo.uniqueness;
  const auto& u1 = back.uniqueness;
  CHECK(u1.center_unique == u0.center_unique);
  CHECK(u1.radius_unique == u0.radius_unique);
  CHECK(u1.margin_unique == u0.margin_unique);
  CHECK(u1.r_lower == u0.r_lower);
  CHECK(u1.r_upper == u0.r_upper);
  CHECK(u1.q_lower == u0.q_lower);
  CHECK(u1.q_upper == u0.q_upper);
  CHECK(u1.free_positive_sv == u0.free_positive_sv);
  CHECK(u1.free_negative_sv == u0.free_negative_sv);
  CHECK(u1.clipped_at_zero == u0.clipped_at_zero);
  CHECK(u1.gamma_star == u0.gamma_star);

  CHECK(back.nu.applicable == mo.nu.applicable);
  CHECK(back.nu.all_hold == mo.nu.all_hold);
  REQUIRE(back.nu.rows.size() == mo.nu.rows.size());
  for (std::size_t i = 0; i < mo.nu.rows.size(); ++i) {
    CHECK(back.nu.rows[i].name == mo.nu.rows[i].name);
    CHECK(back.nu.rows[i].lhs == mo.nu.rows[i].lhs);
    CHECK(back.nu.rows[i].rhs == mo.nu.rows[i].rhs);
    CHECK(back.nu.rows[i].holds == mo.nu.rows[i].holds);
  }

  REQUIRE(back.support_index.size() == mo.support_index.size());
  for (std::size_t i = 0; i < mo.support_index.size(); ++i) {
    CHECK(back.support_index[i] == mo.support_index[i]);
    CHECK(back.support_y[i] == mo.support_y[i]);
  }
}

TEST_CASE("infinite interval ends are stored as strings and read back") {
  const auto mo = csslm::train(fixtures::oneclass2(), KernelSpec::linear(),
                               fixtures::oneclass2_params());
  REQUIRE(std::isinf(mo.uniqueness.q_upper));

  fixtures::TempDir tmp;
  const auto path = tmp.file("oneclass.json");
  csslm::save_model(mo, path);

  const auto j = read_json(path);
  const auto& uq = j.at("diagnostics").at("uniqueness");
  CHECK(uq.at("q_upper").is_string());
  CHECK(uq.at("q_upper").get<std::string>() == "inf");
  CHECK(uq.at("q_lower").is_string());
  CHECK(uq.at("q_lower").get<std::string>() == "-inf");

  const auto back = csslm::load_model(path);
  CHECK(std::isinf(back.uniqueness.q_upper));
  CHECK(back.uniqueness.q_upper > 0.0);
  CHECK(std::isinf(back.uniqueness.q_lower));
  CHECK(back.uniqueness.q_lower < 0.0);
}

TEST_CASE("sgd models serialize an explicit center and nan diagnostics") {
  csslm::SgdConfig opts;
  opts.iterations = 500;
  opts.seed = 7;
  const auto mo = csslm::pegasos_train(fixtures::symmetric4(),
                                       fixtures::symmetric4_params(), opts);
  REQUIRE_FALSE(mo.kernel_space());
  REQUIRE(std::isnan(mo.kkt_max_residual));

  fixtures::TempDir tmp;
  const auto path = tmp.file("sgd.json");
  csslm::save_model(mo, path);

  const auto j = read_json(path);
  CHECK(j.at("diagnostics").at("kkt_max_residual").is_null());
  REQUIRE(j.contains("center"));

  const auto back = csslm::load_model(path);
  REQUIRE_FALSE(back.kernel_space());
  REQUIRE(back.center.size() == mo.center.size());
  for (Eigen::Index i = 0; i < mo.center.size(); ++i)
    CHECK(back.center(i) == mo.center(i));
  CHECK(std::isnan(back.kkt_max_residual));

  const Eigen::Vector2d z(0.3, -0.7);
  CHECK(csslm::predict_point(back, z).score == csslm::predict_point(mo, z).score);
}

TEST_CASE("lp dual multipliers are persisted and certify after reload") {
  const auto d = fixtures::lp_duplicated2();
  const auto p = fixtures::lp_params();
  const auto mo = csslm::train(d, KernelSpec::linear(), p);
  REQUIRE(mo.regime.kind == RegimeKind::DegenerateLP);
  REQUIRE(mo.dual.alpha.size() == 1);

  fixtures::TempDir tmp;
  const auto path = tmp.file("lp.json");
  csslm::save_model(mo, path);

  const auto j = read_json(path);
  REQUIRE(j.at("diagnostics").contains("lp_dual"));

  const auto back = csslm::load_model(path);
  REQUIRE(back.dual.alpha.size() == 1);
  CHECK(back.dual.alpha(0) == mo.dual.alpha(0));

  const auto K = csslm::gram(KernelSpec::linear(), d);
  const auto report = csslm::check_kkt(back, K, d, p);
  CHECK(report.max_residual <= 1e-6);
}

TEST_CASE("a reloaded main model still certifies through full_alpha") {
  const auto d = fixtures::symmetric4();
  const auto p = fixtures::symmetric4_params();
  const auto mo = csslm::train(d, KernelSpec::linear(), p);

  fixtures::TempDir tmp;
  const auto path = tmp.file("main.json");
  csslm::save_model(mo, path);
  const auto back = csslm::load_model(path);

  CHECK(back.dual.alpha.size() == 0);
  const auto alpha = back.full_alpha();
  REQUIRE(alpha.size() == 4);
  CHECK_THAT(alpha(0), WithinAbs(0.9, 1e-5));
  CHECK_THAT(alpha(2), WithinAbs(0.4, 1e-5));

  const auto K = csslm::gram(KernelSpec::linear(), d);
  const auto report = csslm::check_kkt(back, K, d, p);
  CHECK(report.max_residual <= 1e-8);
}

TEST_CASE("version and format problems are reported as data errors") {
  const auto mo = csslm::train(fixtures::symmetric4(), KernelSpec::linear(),
                               fixtures::symmetric4_params());

  fixtures::TempDir tmp;
  const auto good = tmp.file("good.json");
  csslm::save_model(mo, good);

  auto j = read_json(good);
  j["version"] = 2;
  CHECK_THROWS_MATCHES(csslm::model_from_json(j), csslm::DataError,
                       MessageMatches(ContainsSubstring("expected 1")));

  j.erase("version");
  CHECK_THROWS_MATCHES(csslm::model_from_json(j), csslm::DataError,
                       MessageMatches(ContainsSubstring("expected 1")));

  auto bad_kernel = read_json(good);
  bad_kernel["kernel"]["kind"] = "quantum";
  CHECK_THROWS_MATCHES(csslm::model_from_json(bad_kernel), csslm::DataError,
                       MessageMatches(ContainsSubstring("unknown kernel kind")));

  auto bad_regime = read_json(good);
  bad_regime["regime"]["kind"] = "MysteryQP";
  CHECK_THROWS_MATCHES(csslm::model_from_json(bad_regime), csslm::DataError,
                       MessageMatches(ContainsSubstring("unknown regime")));

  auto bad_dim = read_json(good);
  bad_dim["support_points"][0]["features"] = {1.0, 2.0, 3.0};
  CHECK_THROWS_MATCHES(csslm::model_from_json(bad_dim), csslm::DataError,
                       MessageMatches(ContainsSubstring("wrong feature dimension")));

  const auto mangled = tmp.file("mangled.json");
  fixtures::write_file(mangled, "{ \"version\": 1, oops");
  CHECK_THROWS_MATCHES(csslm::load_model(mangled), csslm::DataError,
                       MessageMatches(ContainsSubstring("parse error")));

  CHECK_THROWS_MATCHES(csslm::load_model(tmp.file("absent.json")),
                       csslm::DataError,
                       MessageMatches(ContainsSubstring("cannot open model file")));

  CHECK_THROWS_MATCHES(
      csslm::save_model(mo, "/nonexistent_dir_csslm/deep/model.json"),
      csslm::DataError, MessageMatches(ContainsSubstring("for writing")));
}
