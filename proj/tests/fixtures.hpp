#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <Eigen/Dense>

#include <csslm/csslm.hpp>

// Hand-solved instances shared across the test suite. Each returns the
// dataset in canonical order; the matching hyperparameters sit beside it.
namespace fixtures {

// Positives (+-1, 0), negatives (0, +-2). With nu = 0.25, mu = 0.2, b = 1
// the optimum is a = (0,0), r = 1, t = 3, alpha = (0.9, 0.9, 0.4, 0.4),
// h = -0.7 (g = -0.175).
inline csslm::Dataset symmetric4() {
  Eigen::MatrixXd x(4, 2);
  x << 1, 0, -1, 0, 0, 2, 0, -2;
  return csslm::make_dataset(x, {1, 1, -1, -1});
}

inline csslm::HyperParams symmetric4_params() {
  csslm::HyperParams p;
  p.nu = 0.25;
  p.mu = 0.2;
  p.b = 1.0;
  return p;
}

// (0,0) positive, (2,0) negative. nu = mu = 0.25 gives DegenerateQP with
// lambda = 0.25; optimum a = (-2, 0), r = 0, t = 16, g = -1 (h = -2).
inline csslm::Dataset degenerate2() {
  Eigen::MatrixXd x(2, 2);
  x << 0, 0, 2, 0;
  return csslm::make_dataset(x, {1, -1});
}

inline csslm::HyperParams degenerate2_params() {
  csslm::HyperParams p;
  p.nu = 0.25;
  p.mu = 0.25;
  p.b = 1.0;
  return p;
}

// (0,0), (2,0) positive, (10,0) negative, nu = 1, mu = 0: closed form with
// a = (1,0), r = 0, t = 81, g = 1/3.
inline csslm::Dataset trivial3() {
  Eigen::MatrixXd x(3, 2);
  x << 0, 0, 2, 0, 10, 0;
  return csslm::make_dataset(x, {1, 1, -1});
}

inline csslm::HyperParams trivial3_params() {
  csslm::HyperParams p;
  p.nu = 1.0;
  p.mu = 0.0;
  p.b = 1.0;
  return p;
}

// (1,0) positive, (0,1) negative, mu = m/l = 0.5: the degenerate LP is
// unbounded below (the positive mean pulls a along a ray for free).
inline csslm::Dataset lp_unbounded2() {
  Eigen::MatrixXd x(2, 2);
  x << 1, 0, 0, 1;
  return csslm::make_dataset(x, {1, -1});
}

// The same point (1,0) labeled positive and negative, mu = 0.5: the LP is
// bounded with optimal value -1/2 (h = 0) and a massively non-unique center.
inline csslm::Dataset lp_duplicated2() {
  Eigen::MatrixXd x(2, 2);
  x << 1, 0, 1, 0;
  return csslm::make_dataset(x, {1, -1});
}

inline csslm::HyperParams lp_params() {
  csslm::HyperParams p;
  p.nu = 0.5;
  p.mu = 0.5;
  p.b = 1.0;
  return p;
}

// One-class pair (+-1, 0), nu = 0.5, mu = 0: MainQP with alpha = (0.5, 0.5),
// a = (0,0), r = 1, t = 0, h = 0.5.
inline csslm::Dataset oneclass2() {
  Eigen::MatrixXd x(2, 2);
  x << 1, 0, -1, 0;
  return csslm::make_dataset(x, {1, 1});
}

inline csslm::HyperParams oneclass2_params() {
  csslm::HyperParams p;
  p.nu = 0.5;
  p.mu = 0.0;
  p.b = 1.0;
  return p;
}

// Scratch directory removed on destruction; file() returns paths inside it.
struct TempDir {
  std::filesystem::path root;

  TempDir() {
    std::random_device rd;
    root = std::filesystem::temp_directory_path() /
           ("csslm_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(root);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(root, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (root / name).string(); }
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace fixtures
