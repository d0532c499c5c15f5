#include <catch2/catch_amalgamated.hpp>

#include <csslm/csslm.hpp>

#include "fixtures.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
using Catch::Matchers::WithinAbs;
using csslm::KernelSpec;

namespace {

std::vector<std::string> row_names(const csslm::KktReport& rep) {
  std::vector<std::string> names;
  for (const auto& row : rep.rows) names.push_back(row.name);
  return names;
}

}  // namespace

TEST_CASE("optimal main QP model passes every KKT group") {
  const auto d = fixtures::symmetric4();
  const auto p = fixtures::symmetric4_params();
  const auto K = csslm::gram(KernelSpec::linear(), d);
  const auto mo = csslm::train(d, KernelSpec::linear(), p);

  const auto rep = csslm::check_kkt(mo, K, d, p);
  CHECK(rep.max_residual <= 1e-8);
  CHECK(row_names(rep) ==
        std::vector<std::string>{"primal_feasibility", "stationarity", "dual_feasibility",
                                 "complementarity_slack", "complementarity_constraint",
                                 "margin_complementarity"});
  REQUIRE(rep.xi.size() == 4);
  CHECK(rep.xi.lpNorm<Eigen::Infinity>() <= 1e-6);
  CHECK(rep.residual("stationarity") <= 1e-8);
}

TEST_CASE("perturbing one dual coordinate lights up margin complementarity") {
  const auto d = fixtures::symmetric4();
  const auto p = fixtures::symmetric4_params();
  const auto K = csslm::gram(KernelSpec::linear(), d);
  auto mo = csslm::train(d, KernelSpec::linear(), p);

  mo.dual.alpha(2) = 0.5;
  const auto rep = csslm::check_kkt(mo, K, d, p);

  // t * (sum_neg alpha - l mu) = 3 * 0.1 = 0.3, reported as 0.3 / 1.3.
  CHECK_THAT(rep.residual("margin_complementarity"), WithinAbs(0.3 / 1.3, 1e-3));
  CHECK(rep.residual("margin_complementarity") >= 0.09);
  CHECK(rep.max_residual > 0.1);
}

TEST_CASE("tampering with the radius lights up constraint complementarity") {
  const auto d = fixtures::symmetric4();
  const auto p = fixtures::symmetric4_params();
  const auto K = csslm::gram(KernelSpec::linear(), d);
  auto mo = csslm::train(d, KernelSpec::linear(), p);

  mo.r = 2.0;
  const auto rep = csslm::check_kkt(mo, K, d, p);
  CHECK_THAT(rep.residual("complementarity_constraint"), WithinAbs(0.9 / 1.9, 1e-3));
  CHECK(rep.max_residual > 0.1);
}

TEST_CASE("trivial closed form verifies exactly") {
  const auto d = fixtures::trivial3();
  const auto p = fixtures::trivial3_params();
  const auto K = csslm::gram(KernelSpec::linear(), d);
  const auto mo = csslm::train(d, KernelSpec::linear(), p);

  const auto rep = csslm::check_kkt(mo, K, d, p);
  CHECK(rep.max_residual == 0.0);
  CHECK(row_names(rep) ==
        std::vector<std::string>{"center_identity", "margin_identity", "primal_feasibility"});
}

TEST_CASE("degenerate QP model passes its five KKT groups") {
  const auto d = fixtures::degenerate2();
  const auto p = fixtures::degenerate2_params();
  const auto K = csslm::gram(KernelSpec::linear(), d);
  const auto mo = csslm::train(d, KernelSpec::linear(), p);

  const auto rep = csslm::check_kkt(mo, K, d, p);
  CHECK(rep.max_residual <= 1e-8);
  CHECK(row_names(rep) ==
        std::vector<std::string>{"primal_feasibility", "stationarity", "dual_feasibility",
                                 "complementarity_slack", "complementarity_constraint"});
}

TEST_CASE("LP model closes its duality gap") {
  const auto d = fixtures::lp_duplicated2();
  const auto p = fixtures::lp_params();
  const auto K = csslm::gram(KernelSpec::linear(), d);
  const auto mo = csslm::train(d, KernelSpec::linear(), p);

  const auto rep = csslm::check_kkt(mo, K, d, p);
  CHECK(rep.residual("duality_gap") <= 1e-6);
  CHECK(rep.max_residual <= 1e-6);
  CHECK(row_names(rep) ==
        std::vector<std::string>{"primal_feasibility", "dual_feasibility", "stationarity",
                                 "complementarity_slack", "complementarity_constraint",
                                 "duality_gap"});

  auto broken = mo;
  broken.dual.alpha.resize(0);
  CHECK_THROWS_MATCHES(csslm::check_kkt(broken, K, d, p), std::invalid_argument,
                       MessageMatches(ContainsSubstring("missing its dual multipliers")));
}

TEST_CASE("unknown KKT group name throws") {
  const auto d = fixtures::symmetric4();
  const auto p = fixtures::symmetric4_params();
  const auto K = csslm::gram(KernelSpec::linear(), d);
  const auto rep = csslm::check_kkt(csslm::train(d, KernelSpec::linear(), p), K, d, p);
  CHECK_THROWS_MATCHES(rep.residual("no_such_group"), std::invalid_argument,
                       MessageMatches(ContainsSubstring("no KKT group named")));
}

TEST_CASE("nu-property rows for the symmetric benchmark") {
  const auto d = fixtures::symmetric4();
  const auto p = fixtures::symmetric4_params();
  const auto mo = csslm::train(d, KernelSpec::linear(), p);

  const auto rep = csslm::nu_property(mo);
  REQUIRE(rep.applicable);
  CHECK(rep.margin_errors_pos == 0);
  CHECK(rep.margin_errors_neg == 0);
  CHECK(rep.sv_pos == 2);
  CHECK(rep.sv_neg == 2);
  REQUIRE(rep.rows.size() == 4);

  CHECK(rep.rows[0].name == "m+/l <= nu+mu");
  CHECK(rep.rows[0].lhs == 0.0);
  CHECK_THAT(rep.rows[0].rhs, WithinAbs(0.45, 1e-12));
  CHECK(rep.rows[1].name == "nu+mu <= s+/l");
  CHECK_THAT(rep.rows[1].rhs, WithinAbs(0.5, 1e-12));
  CHECK(rep.rows[2].name == "n+/l <= mu/b");
  CHECK_THAT(rep.rows[2].rhs, WithinAbs(0.2, 1e-12));
  CHECK(rep.rows[3].name == "mu/b <= s-/l");
  CHECK_THAT(rep.rows[3].rhs, WithinAbs(0.5, 1e-12));
  CHECK(rep.all_hold);
}

TEST_CASE("nu-property one-class rows bound the positive fractions") {
  const auto d = fixtures::oneclass2();
  const auto p = fixtures::oneclass2_params();
  const auto mo = csslm::train(d, KernelSpec::linear(), p);

  const auto rep = csslm::nu_property(mo);
  REQUIRE(rep.applicable);
  CHECK_THAT(rep.note, ContainsSubstring("one-class"));
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].name == "m+/m <= nu");
  CHECK(rep.rows[0].lhs == 0.0);
  CHECK(rep.rows[0].rhs == 0.5);
  CHECK(rep.rows[1].name == "nu <= s+/m");
  CHECK(rep.rows[1].lhs == 0.5);
  CHECK(rep.rows[1].rhs == 1.0);
  CHECK(rep.all_hold);
}

TEST_CASE("nu-property degenerate rows bound the negative fractions") {
  const auto d = fixtures::degenerate2();
  const auto p = fixtures::degenerate2_params();
  const auto mo = csslm::train(d, KernelSpec::linear(), p);

  const auto rep = csslm::nu_property(mo);
  REQUIRE(rep.applicable);
  CHECK_THAT(rep.note, ContainsSubstring("degenerate"));
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].name == "n+/l <= mu/b");
  CHECK(rep.rows[0].lhs == 0.0);
  CHECK(rep.rows[0].rhs == 0.25);
  CHECK(rep.rows[1].name == "mu/b <= s-/l");
  CHECK(rep.rows[1].lhs == 0.25);
  CHECK(rep.rows[1].rhs == 0.5);
  CHECK(rep.all_hold);
}

TEST_CASE("nu-property switches to mixed bounds at zero optimal margin") {
  const auto d = fixtures::symmetric4();
  csslm::HyperParams p;
  p.nu = 0.25;
  p.mu = 0.0;
  const auto mo = csslm::train(d, KernelSpec::linear(), p);
  REQUIRE(mo.regime.kind == csslm::RegimeKind::MainQP);
  REQUIRE(mo.t <= 1e-9);

  const auto rep = csslm::nu_property(mo);
  REQUIRE(rep.applicable);
  CHECK_THAT(rep.note, ContainsSubstring("zero"));
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[0].name == "m+/l <= nu + b s-/l");
  CHECK(rep.rows[1].name == "nu + b n+/l <= s+/l");
  CHECK(rep.rows[2].name == "mu/b <= s-/l");
  CHECK(rep.all_hold);
}

TEST_CASE("nu-property is not defined for trivial, LP, or precomputed models") {
  const auto triv = csslm::train(fixtures::trivial3(), KernelSpec::linear(),
                                 fixtures::trivial3_params());
  const auto rep_triv = csslm::nu_property(triv);
  CHECK_FALSE(rep_triv.applicable);
  CHECK_THAT(rep_triv.note, ContainsSubstring("TrivialClosedForm"));

  const auto lp = csslm::train(fixtures::lp_duplicated2(), KernelSpec::linear(),
                               fixtures::lp_params());
  CHECK_FALSE(csslm::nu_property(lp).applicable);

  const auto d = fixtures::symmetric4();
  const auto K = csslm::gram(KernelSpec::linear(), d);
  const auto pre = csslm::train(d, KernelSpec::precomputed(K), fixtures::symmetric4_params());
  CHECK_THROWS_MATCHES(csslm::nu_property(pre), std::invalid_argument,
                       MessageMatches(ContainsSubstring("precomputed")));
}
