#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <csslm/csslm.hpp>

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
using Catch::Matchers::WithinAbs;
using csslm::QpProblem;
using csslm::QpStatus;

TEST_CASE("unconstrained quadratic solves in one KKT step") {
  QpProblem p(2);
  p.Q << 2, 0, 0, 2;
  p.c << -2, -4;

  const auto sol = csslm::solve_qp(p);
  REQUIRE(sol.status == QpStatus::Optimal);
  CHECK(sol.iterations == 1);
  CHECK_THAT(sol.x(0), WithinAbs(1.0, 1e-8));
  CHECK_THAT(sol.x(1), WithinAbs(2.0, 1e-8));
  CHECK_THAT(sol.objective, WithinAbs(-5.0, 1e-8));
  CHECK(sol.kkt_residual < 1e-8);
}

TEST_CASE("equality constraint recovers the multiplier") {
  QpProblem p(2);
  p.Q = Eigen::MatrixXd::Identity(2, 2);
  p.A = Eigen::MatrixXd::Ones(1, 2);
  p.b = Eigen::VectorXd::Constant(1, 2.0);

  const auto sol = csslm::solve_qp(p);
  REQUIRE(sol.status == QpStatus::Optimal);
  CHECK_THAT(sol.x(0), WithinAbs(1.0, 1e-8));
  CHECK_THAT(sol.x(1), WithinAbs(1.0, 1e-8));
  CHECK_THAT(sol.y(0), WithinAbs(-1.0, 1e-8));
  CHECK_THAT(sol.objective, WithinAbs(1.0, 1e-8));
}

TEST_CASE("box LP lands on the right vertex") {
  QpProblem p(2);
  p.c << 1, -1;
  p.lo.setZero();
  p.hi.setOnes();

  const auto sol = csslm::solve_qp(p);
  REQUIRE(sol.status == QpStatus::Optimal);
  CHECK_THAT(sol.x(0), WithinAbs(0.0, 1e-7));
  CHECK_THAT(sol.x(1), WithinAbs(1.0, 1e-7));
  CHECK_THAT(sol.objective, WithinAbs(-1.0, 1e-7));
  CHECK_THAT(sol.dual_objective, WithinAbs(sol.objective, 1e-6));
  CHECK_THAT(sol.z_lo(0), WithinAbs(1.0, 1e-6));
  CHECK_THAT(sol.z_hi(1), WithinAbs(1.0, 1e-6));
}

TEST_CASE("active inequality yields its multiplier") {
  QpProblem p(1);
  p.Q << 1;
  p.G = Eigen::MatrixXd::Constant(1, 1, -1.0);
  p.h = Eigen::VectorXd::Constant(1, -1.0);

  const auto sol = csslm::solve_qp(p);
  REQUIRE(sol.status == QpStatus::Optimal);
  CHECK_THAT(sol.x(0), WithinAbs(1.0, 1e-7));
  CHECK_THAT(sol.z_ineq(0), WithinAbs(1.0, 1e-6));
  CHECK_THAT(sol.objective, WithinAbs(0.5, 1e-7));
}

TEST_CASE("contradictory inequalities report Infeasible") {
  QpProblem p(1);
  p.Q << 2;
  p.G = Eigen::MatrixXd(2, 1);
  p.G << 1, -1;
  p.h = Eigen::VectorXd(2);
  p.h << -1, -1;

  const auto sol = csslm::solve_qp(p);
  CHECK(sol.status == QpStatus::Infeasible);
}

TEST_CASE("descent ray reports Unbounded") {
  QpProblem p(1);
  p.c << -1;
  p.lo << 0;

  const auto sol = csslm::solve_qp(p);
  CHECK(sol.status == QpStatus::Unbounded);
}

TEST_CASE("unconstrained linear objective reports Unbounded from one solve") {
  QpProblem p(1);
  p.c << 1;

  const auto sol = csslm::solve_qp(p);
  CHECK(sol.status == QpStatus::Unbounded);
}

TEST_CASE("inconsistent equalities report Infeasible from one solve") {
  QpProblem p(1);
  p.A = Eigen::MatrixXd::Ones(2, 1);
  p.b = Eigen::VectorXd(2);
  p.b << 1, 2;

  const auto sol = csslm::solve_qp(p);
  CHECK(sol.status == QpStatus::Infeasible);
}

TEST_CASE("zero-variable problems reduce to feasibility of the constants") {
  QpProblem feasible(0);
  feasible.constant = 3.0;
  const auto ok = csslm::solve_qp(feasible);
  CHECK(ok.status == QpStatus::Optimal);
  CHECK(ok.objective == 3.0);

  QpProblem infeasible(0);
  infeasible.A = Eigen::MatrixXd(1, 0);
  infeasible.b = Eigen::VectorXd::Constant(1, 1.0);
  CHECK(csslm::solve_qp(infeasible).status == QpStatus::Infeasible);
}

TEST_CASE("validate rejects malformed problems") {
  QpProblem asym(2);
  asym.Q << 1, 0.5, 0.2, 1;
  CHECK_THROWS_MATCHES(csslm::solve_qp(asym), std::invalid_argument,
                       MessageMatches(ContainsSubstring("not symmetric")));

  QpProblem box(1);
  box.lo << 1;
  box.hi << 0;
  CHECK_THROWS_MATCHES(csslm::solve_qp(box), std::invalid_argument,
                       MessageMatches(ContainsSubstring("lo > hi")));

  QpProblem mismatch(2);
  mismatch.Q = Eigen::MatrixXd::Identity(1, 1);
  CHECK_THROWS_MATCHES(csslm::solve_qp(mismatch), std::invalid_argument,
                       MessageMatches(ContainsSubstring("Q dimension")));

  QpProblem indef(1);
  indef.Q << -2;
  CHECK_THROWS_MATCHES(csslm::solve_qp(indef), std::invalid_argument,
                       MessageMatches(ContainsSubstring("positive semidefinite")));

  QpProblem badeq(2);
  badeq.A = Eigen::MatrixXd::Ones(1, 2);
  CHECK_THROWS_MATCHES(csslm::solve_qp(badeq), std::invalid_argument,
                       MessageMatches(ContainsSubstring("A/b dimension")));
}

TEST_CASE("random PSD box problems close the duality gap") {
  std::mt19937 rng(42);
  std::normal_distribution<double> g(0.0, 1.0);
  const int n = 5;

  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) B(i, j) = g(rng);

    QpProblem p(n);
    p.Q = B.transpose() * B;
    for (int i = 0; i < n; ++i) p.c(i) = g(rng);
    p.lo.setConstant(-1.0);
    p.hi.setConstant(2.0);
    if (trial % 2 == 0) {
      p.A = Eigen::MatrixXd::Ones(1, n);
      p.b = Eigen::VectorXd::Constant(1, 1.0);
    }

    const auto sol = csslm::solve_qp(p);
    INFO("trial " << trial);
    REQUIRE(sol.status == QpStatus::Optimal);
    CHECK(sol.kkt_residual <= 1e-8);
    CHECK(std::abs(sol.objective - sol.dual_objective) <= 1e-6 * (1.0 + std::abs(sol.objective)));
    for (int i = 0; i < n; ++i) {
      CHECK(sol.x(i) >= p.lo(i) - 1e-8);
      CHECK(sol.x(i) <= p.hi(i) + 1e-8);
    }
    if (p.A.rows() > 0) CHECK_THAT(sol.x.sum(), WithinAbs(1.0, 1e-7));
  }
}

TEST_CASE("iteration cap returns MaxIter") {
  QpProblem p(2);
  p.c << 1, -1;
  p.lo.setZero();
  p.hi.setOnes();

  csslm::QpOptions opt;
  opt.max_iter = 1;
  const auto sol = csslm::solve_qp(p, opt);
  CHECK(sol.status == QpStatus::MaxIter);
}

TEST_CASE("identical inputs give bit-identical solutions") {
  QpProblem p(3);
  p.Q = Eigen::MatrixXd::Identity(3, 3) * 2.0;
  p.c << 0.3, -0.7, 1.1;
  p.lo.setConstant(-0.5);
  p.hi.setConstant(0.5);

  const auto a = csslm::solve_qp(p);
  const auto b = csslm::solve_qp(p);
  REQUIRE(a.status == b.status);
  CHECK(a.objective == b.objective);
  CHECK(a.x == b.x);
  CHECK(a.iterations == b.iterations);
}
