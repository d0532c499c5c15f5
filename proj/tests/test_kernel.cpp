#include <catch2/catch_amalgamated.hpp>

#include <csslm/csslm.hpp>

#include "fixtures.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("eval_kernel computes the advertised closed forms") {
  Eigen::Vector2d x(1.0, 2.0), y(3.0, -1.0);

  CHECK(csslm::eval_kernel(csslm::KernelSpec::linear(), x, y) == 1.0);
  CHECK_THAT(csslm::eval_kernel(csslm::KernelSpec::rbf(0.5), x, y),
             WithinRel(std::exp(-0.5 * 13.0), 1e-15));
  CHECK(csslm::eval_kernel(csslm::KernelSpec::polynomial(2, 1.0), x, y) == 4.0);
  CHECK(csslm::eval_kernel(csslm::KernelSpec::polynomial(3, 0.0), x, y) == 1.0);

  Eigen::VectorXd xd = x, zd = Eigen::Vector3d(1.0, 2.0, 3.0);
  CHECK_THROWS_MATCHES(csslm::eval_kernel(csslm::KernelSpec::linear(), xd, zd),
                       std::invalid_argument,
                       MessageMatches(ContainsSubstring("differ in dimension")));
}

TEST_CASE("kernel factories validate their parameters") {
  CHECK_THROWS_MATCHES(csslm::KernelSpec::rbf(0.0), std::invalid_argument,
                       MessageMatches(ContainsSubstring("gamma > 0")));
  CHECK_THROWS_MATCHES(csslm::KernelSpec::rbf(-1.0), std::invalid_argument,
                       MessageMatches(ContainsSubstring("gamma > 0")));
  CHECK_THROWS_MATCHES(csslm::KernelSpec::polynomial(0, 1.0), std::invalid_argument,
                       MessageMatches(ContainsSubstring("degree >= 1")));

  Eigen::MatrixXd rect(2, 3);
  rect.setZero();
  CHECK_THROWS_MATCHES(csslm::KernelSpec::precomputed(rect), std::invalid_argument,
                       MessageMatches(ContainsSubstring("square")));

  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.5, 0.7, 1;
  CHECK_THROWS_MATCHES(csslm::KernelSpec::precomputed(asym), std::invalid_argument,
                       MessageMatches(ContainsSubstring("not symmetric")));
}

TEST_CASE("gram is symmetric and precomputed kernels pass through") {
  const auto d = fixtures::symmetric4();
  const auto K = csslm::gram(csslm::KernelSpec::rbf(0.3), d);

  REQUIRE(K.rows() == 4);
  REQUIRE(K.cols() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(K(i, i) == 1.0);
    for (int j = 0; j < 4; ++j) CHECK(K(i, j) == K(j, i));
  }
  CHECK_THAT(K(0, 1), WithinRel(std::exp(-0.3 * 4.0), 1e-15));

  const auto spec = csslm::KernelSpec::precomputed(K);
  const auto K2 = csslm::gram(spec, d);
  CHECK(K2 == K);

  const auto small = fixtures::oneclass2();
  CHECK_THROWS_MATCHES(csslm::gram(spec, small), std::invalid_argument,
                       MessageMatches(ContainsSubstring("size mismatch")));

  CHECK_THROWS_MATCHES(
      csslm::eval_kernel(spec, Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)),
      std::invalid_argument, MessageMatches(ContainsSubstring("cannot evaluate raw points")));
}

TEST_CASE("cubic feature map reproduces the degree-3 kernel") {
  const auto spec = csslm::KernelSpec::polynomial(3, 1.0);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Vector2d x(u(rng), u(rng)), y(u(rng), u(rng));
    const double via_map = csslm::cubic_feature_map(x).dot(csslm::cubic_feature_map(y));
    const double direct = csslm::eval_kernel(spec, x, y);
    CHECK_THAT(via_map, WithinRel(direct, 1e-12));
  }
  CHECK(csslm::cubic_feature_map(Eigen::Vector2d(0, 0)).squaredNorm() == 1.0);
}

TEST_CASE("has_explicit_features matches the supported kernels exactly") {
  CHECK(csslm::has_explicit_features(csslm::KernelSpec::linear(), 2));
  CHECK(csslm::has_explicit_features(csslm::KernelSpec::linear(), 7));
  CHECK(csslm::has_explicit_features(csslm::KernelSpec::polynomial(3, 1.0), 2));
  CHECK_FALSE(csslm::has_explicit_features(csslm::KernelSpec::polynomial(3, 1.0), 3));
  CHECK_FALSE(csslm::has_explicit_features(csslm::KernelSpec::polynomial(2, 1.0), 2));
  CHECK_FALSE(csslm::has_explicit_features(csslm::KernelSpec::polynomial(3, 0.5), 2));
  CHECK_FALSE(csslm::has_explicit_features(csslm::KernelSpec::rbf(1.0), 2));

  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  CHECK_FALSE(csslm::has_explicit_features(csslm::KernelSpec::precomputed(eye), 2));
}

TEST_CASE("feature_vector and feature_matrix exist only for explicit maps") {
  const auto d = fixtures::symmetric4();

  const auto F_lin = csslm::feature_matrix(csslm::KernelSpec::linear(), d);
  CHECK(F_lin == d.x);

  const auto spec3 = csslm::KernelSpec::polynomial(3, 1.0);
  const auto F = csslm::feature_matrix(spec3, d);
  REQUIRE(F.cols() == 10);
  const auto K = csslm::gram(spec3, d);
  CHECK_THAT((F * F.transpose() - K).cwiseAbs().maxCoeff(), WithinAbs(0.0, 1e-12));

  Eigen::VectorXd x(2);
  x << 1, 2;
  CHECK(csslm::feature_vector(csslm::KernelSpec::linear(), x) == x);
  CHECK(csslm::feature_vector(spec3, x).size() == 10);

  CHECK_THROWS_MATCHES(csslm::feature_vector(csslm::KernelSpec::rbf(1.0), x),
                       std::invalid_argument,
                       MessageMatches(ContainsSubstring("no explicit feature map")));
  CHECK_THROWS_MATCHES(csslm::feature_matrix(csslm::KernelSpec::rbf(1.0), d),
                       std::invalid_argument,
                       MessageMatches(ContainsSubstring("no explicit feature map")));
}

TEST_CASE("load_gram_csv reads square matrices and rejects bad files") {
  fixtures::TempDir tmp;

  const auto good = tmp.file("gram.csv");
  fixtures::write_file(good, "1,0.5\n0.5,1\n");
  const auto K = csslm::load_gram_csv(good);
  REQUIRE(K.rows() == 2);
  CHECK(K(0, 1) == 0.5);
  CHECK(K(1, 1) == 1.0);

  const auto ragged = tmp.file("ragged.csv");
  fixtures::write_file(ragged, "1,0.5\n0.5\n");
  CHECK_THROWS_MATCHES(csslm::load_gram_csv(ragged), csslm::DataError,
                       MessageMatches(ContainsSubstring("ragged")));

  const auto rect = tmp.file("rect.csv");
  fixtures::write_file(rect, "1,0.5\n");
  CHECK_THROWS_MATCHES(csslm::load_gram_csv(rect), csslm::DataError,
                       MessageMatches(ContainsSubstring("not square")));

  const auto junk = tmp.file("junk.csv");
  fixtures::write_file(junk, "1,zzz\n0.5,1\n");
  CHECK_THROWS_MATCHES(csslm::load_gram_csv(junk), csslm::DataError,
                       MessageMatches(ContainsSubstring("parse error")));

  CHECK_THROWS_MATCHES(csslm::load_gram_csv(tmp.file("nope.csv")), csslm::DataError,
                       MessageMatches(ContainsSubstring("cannot open")));
}
