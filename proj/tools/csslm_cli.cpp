// csslm: train, inspect, and apply small-sphere large-margin anomaly
// detectors from the command line.
//
// Exit codes: 0 success, 1 generic failure (bad arguments, I/O, data),
// 2 ill-posed hyperparameters (unbounded objective), 3 solver failure.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include <csslm/csslm.hpp>

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

csslm::Dataset load_data(const std::string& path, const std::string& format, bool relabel) {
  csslm::Dataset d = csslm::load_dataset(path, format);
  if (relabel) d = csslm::relabel_banana(d);
  return d;
}

// Gram files are stored in the original row order of the data file; the
// dataset loader reorders points positives-first, so the matrix has to be
// permuted the same way.
Eigen::MatrixXd permuted_gram(const std::string& path, const csslm::Dataset& d) {
  const Eigen::MatrixXd raw = csslm::load_gram_csv(path);
  if (raw.rows() != d.l())
    throw csslm::DataError("Gram matrix is " + std::to_string(raw.rows()) + "x" +
                           std::to_string(raw.cols()) + " but the data has " +
                           std::to_string(d.l()) + " rows");
  Eigen::MatrixXd K(d.l(), d.l());
  for (int i = 0; i < d.l(); ++i)
    for (int j = 0; j < d.l(); ++j) K(i, j) = raw(d.source_row[i], d.source_row[j]);
  return K;
}

csslm::KernelSpec make_kernel(const std::string& name, double gamma, int degree, double coef0,
                              const std::string& gram_path, const csslm::Dataset& d) {
  if (!gram_path.empty() || name == "precomputed") {
    if (gram_path.empty())
      throw std::invalid_argument("precomputed kernel requires --gram <file>");
    return csslm::KernelSpec::precomputed(permuted_gram(gram_path, d));
  }
  if (name == "linear") return csslm::KernelSpec::linear();
  if (name == "rbf") return csslm::KernelSpec::rbf(gamma);
  if (name == "poly" || name == "polynomial") return csslm::KernelSpec::polynomial(degree, coef0);
  throw std::invalid_argument("unknown kernel: " + name);
}

// All-numeric CSV, every column a feature. Used by predict --unlabeled.
Eigen::MatrixXd load_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw csslm::DataError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  bool first_data_line = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string field;
    bool header = false;
    while (std::getline(ss, field, ',')) {
      double v;
      if (!csslm::detail::parse_double(field, v)) {
        if (first_data_line) { header = true; break; }
        throw csslm::DataError("parse error at row " + std::to_string(lineno));
      }
      vals.push_back(v);
    }
    if (header) continue;
    first_data_line = false;
    if (!rows.empty() && vals.size() != rows.front().size())
      throw csslm::DataError("row " + std::to_string(lineno) + ": inconsistent dimension");
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw csslm::DataError("no data rows in " + path);
  Eigen::MatrixXd X(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) X(i, j) = rows[i][j];
  return X;
}

struct OutputFile {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit OutputFile(const std::string& path) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw csslm::DataError("cannot write " + path);
    os = &file;
  }
  std::ostream& stream() { return *os; }
};

void print_uniqueness(const csslm::UniquenessReport& u, std::ostream& os) {
  os << "uniqueness: center " << (u.center_unique ? "yes" : "no") << ", radius "
     << (u.radius_unique ? "yes" : "no") << ", margin " << (u.margin_unique ? "yes" : "no")
     << "\n";
  os << "  r in [" << fmt(u.r_lower) << ", " << fmt(u.r_upper) << "], r+t in ["
     << fmt(u.q_lower) << ", " << fmt(u.q_upper) << "]";
  if (u.free_positive_sv >= 0) os << ", free positive SV " << u.free_positive_sv;
  if (u.free_negative_sv >= 0) os << ", free negative SV " << u.free_negative_sv;
  if (u.clipped_at_zero) os << ", margin clipped at zero";
  os << "\n";
  if (!u.gamma_star.empty()) os << "  " << u.gamma_star << "\n";
}

void print_nu(const csslm::NuReport& nu, std::ostream& os) {
  if (!nu.applicable) {
    os << "nu-property: not applicable";
    if (!nu.note.empty()) os << " (" << nu.note << ")";
    os << "\n";
    return;
  }
  os << "nu-property (m+ = " << nu.margin_errors_pos << ", n+ = " << nu.margin_errors_neg
     << ", s+ = " << nu.sv_pos << ", s- = " << nu.sv_neg << "):\n";
  for (const auto& row : nu.rows)
    os << "  " << row.name << ": " << fmt(row.lhs) << " <= " << fmt(row.rhs) << "  "
       << (row.holds ? "holds" : "VIOLATED") << "\n";
  os << (nu.all_hold ? "  all inequalities hold" : "  VIOLATION detected") << "\n";
}

void print_kkt(const csslm::KktReport& kkt, std::ostream& os) {
  os << "KKT residuals:\n";
  for (const auto& row : kkt.rows) os << "  " << row.name << ": " << fmt(row.residual) << "\n";
  os << "  max residual = " << fmt(kkt.max_residual) << "\n";
}

void print_model_summary(const csslm::Model& mo, const csslm::HyperParams& p,
                         std::ostream& os) {
  os << "regime: " << csslm::describe_regime(mo.regime, p, mo.m, mo.n) << "\n";
  os << "l = " << mo.l << " (m = " << mo.m << " positive, n = " << mo.n
     << " negative), dim = " << mo.dim << "\n";
  os << "objective g = " << fmt(mo.dual.objective_g) << "\n";
  os << "r = " << fmt(mo.r) << "\n";
  os << "t = " << fmt(mo.t) << "\n";
  os << "threshold (" << csslm::to_string(mo.threshold) << ") = " << fmt(mo.threshold_value())
     << "\n";
  if (mo.kernel_space())
    os << "support points: " << mo.support_beta.size() << " of " << mo.l << "\n";
  else
    os << "center: explicit, dim " << mo.center.size() << "\n";
  if (std::isfinite(mo.kkt_max_residual))
    os << "KKT max residual = " << fmt(mo.kkt_max_residual) << "\n";
  print_uniqueness(mo.uniqueness, os);
  print_nu(mo.nu, os);
}

struct ErrorCounts {
  int pos = 0, pos_wrong = 0;
  int neg = 0, neg_wrong = 0;

  void add(int label, int predicted) {
    if (label > 0) {
      ++pos;
      if (predicted < 0) ++pos_wrong;
    } else {
      ++neg;
      if (predicted > 0) ++neg_wrong;
    }
  }
  void print(std::ostream& os) const {
    if (pos > 0)
      os << "e+ = " << fmt(100.0 * pos_wrong / pos) << "% (" << pos_wrong << " of " << pos
         << " positives misclassified)\n";
    else
      os << "e+ = n/a (no positive examples)\n";
    if (neg > 0)
      os << "e- = " << fmt(100.0 * neg_wrong / neg) << "% (" << neg_wrong << " of " << neg
         << " negatives misclassified)\n";
    else
      os << "e- = n/a (no negative examples)\n";
  }
};

// One grid line of the --cv loop: whitespace- or comma-separated key=value
// tokens overriding the flags for this run.
int run_cv(const std::string& grid_path, const csslm::Dataset& dtrain,
           const csslm::Dataset& deval, const csslm::KernelSpec& base_spec,
           const csslm::HyperParams& base_p, csslm::ThresholdMode base_thr, double tol) {
  std::ifstream in(grid_path);
  if (!in) throw csslm::DataError("cannot open " + grid_path);

  std::string line;
  int row = 0, trained = 0;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::stringstream ss(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
    if (tokens.empty()) continue;

    ++row;
    csslm::KernelSpec spec = base_spec;
    csslm::HyperParams p = base_p;
    csslm::ThresholdMode thr = base_thr;
    std::string label;
    try {
      for (const auto& t : tokens) {
        const auto eq = t.find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("grid token '" + t + "' is not key=value");
        const std::string key = t.substr(0, eq);
        const std::string val = t.substr(eq + 1);
        if (!label.empty()) label += " ";
        label += t;
        if (key == "nu") p.nu = std::stod(val);
        else if (key == "mu") p.mu = std::stod(val);
        else if (key == "b") p.b = std::stod(val);
        else if (key == "gamma") spec = csslm::KernelSpec::rbf(std::stod(val));
        else if (key == "kernel") {
          if (val == "linear") spec = csslm::KernelSpec::linear();
          else if (val == "rbf") spec = csslm::KernelSpec::rbf(spec.gamma);
          else if (val == "poly" || val == "polynomial")
            spec = csslm::KernelSpec::polynomial(spec.degree, spec.coef0);
          else throw std::invalid_argument("grid kernel '" + val + "' not recognized");
        } else if (key == "threshold") thr = csslm::threshold_from_string(val);
        else throw std::invalid_argument("grid key '" + key + "' not recognized");
      }

      csslm::TrainOptions topt;
      topt.tol = tol;
      topt.threshold = thr;
      const csslm::Model mo = csslm::train(dtrain, spec, p, topt);
      ErrorCounts counts;
      const auto preds = csslm::predict(mo, deval.x);
      for (int i = 0; i < deval.l(); ++i) counts.add(deval.y[i], preds[i].label);
      std::cout << "cv[" << row << "] " << label << ": regime="
                << csslm::to_string(mo.regime.kind) << " g=" << fmt(mo.dual.objective_g)
                << " r=" << fmt(mo.r) << " t=" << fmt(mo.t);
      if (counts.pos > 0) std::cout << " e+=" << fmt(100.0 * counts.pos_wrong / counts.pos) << "%";
      if (counts.neg > 0) std::cout << " e-=" << fmt(100.0 * counts.neg_wrong / counts.neg) << "%";
      std::cout << "\n";
      ++trained;
    } catch (const csslm::UnboundedError& e) {
      std::cout << "cv[" << row << "] " << label << ": unbounded (" << e.what() << ")\n";
    } catch (const std::exception& e) {
      std::cout << "cv[" << row << "] " << label << ": failed (" << e.what() << ")\n";
    }
  }
  if (row == 0) throw csslm::DataError("no grid rows in " + grid_path);
  std::cout << trained << " of " << row << " grid rows trained\n";
  return trained > 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex small-sphere large-margin anomaly detection"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "",
                 "key=value configuration file; subcommand options go under a [subcommand] "
                 "section (or dotted keys like train.nu); flags win");
  int rc = 0;

  // train ------------------------------------------------------------
  auto* train = app.add_subcommand("train", "Fit a model and write it as JSON");
  train->fallthrough();
  std::string tr_data, tr_format = "auto", tr_kernel = "linear", tr_gram, tr_out;
  std::string tr_threshold = "mid", tr_solver = "qp", tr_variant = "plain";
  std::string tr_cv, tr_cv_data;
  double tr_gamma = 1.0, tr_coef0 = 1.0, tr_nu = 0.5, tr_mu = 0.0, tr_b = 1.0, tr_tol = 1e-7;
  int tr_degree = 3;
  long long tr_iterations = 200000;
  std::uint64_t tr_seed = 0;
  bool tr_relabel = false, tr_no_averaging = false;
  train->add_option("--data", tr_data, "training data (CSV: features then a +/-1 label; or libsvm)")
      ->required();
  train->add_option("--format", tr_format, "data format")->check(CLI::IsMember({"auto", "csv", "libsvm"}));
  train->add_flag("--relabel-banana", tr_relabel, "relabel points with x2 + (3/7)(x1-3) > 0 as negative");
  train->add_option("--kernel", tr_kernel, "kernel function")
      ->check(CLI::IsMember({"linear", "rbf", "poly", "polynomial", "precomputed"}));
  train->add_option("--gamma", tr_gamma, "rbf width: exp(-gamma |x-y|^2)");
  train->add_option("--degree", tr_degree, "polynomial degree");
  train->add_option("--coef0", tr_coef0, "polynomial offset");
  train->add_option("--gram", tr_gram, "precomputed Gram matrix CSV (implies --kernel precomputed)");
  train->add_option("--nu", tr_nu, "volume/loss trade-off, > 0");
  train->add_option("--mu", tr_mu, "volume/margin trade-off, >= 0");
  train->add_option("--b", tr_b, "negative-loss weight, >= 1");
  train->add_option("--threshold", tr_threshold, "decision threshold")
      ->check(CLI::IsMember({"inner", "mid", "outer"}));
  train->add_option("--solver", tr_solver, "qp: exact interior point; sgd: Pegasos-style stochastic")
      ->check(CLI::IsMember({"qp", "sgd"}));
  train->add_option("--tol", tr_tol, "certification tolerance (KKT budget is 10x)");
  train->add_option("--iterations", tr_iterations, "sgd iteration count");
  train->add_option("--seed", tr_seed, "sgd sampling seed");
  train->add_option("--sgd-variant", tr_variant, "sgd update rule")
      ->check(CLI::IsMember({"plain", "revisit"}));
  train->add_flag("--no-averaging", tr_no_averaging, "sgd: report the last iterate, not the tail average");
  train->add_option("-o,--out", tr_out, "write the model JSON here");
  train->add_option("--cv", tr_cv, "grid file: one key=value set per line, train each and report errors");
  train->add_option("--cv-data", tr_cv_data, "evaluation data for --cv (default: the training data)");
  train->callback([&] {
    const csslm::Dataset d = load_data(tr_data, tr_format, tr_relabel);
    const csslm::KernelSpec spec = make_kernel(tr_kernel, tr_gamma, tr_degree, tr_coef0, tr_gram, d);
    csslm::HyperParams p;
    p.nu = tr_nu;
    p.mu = tr_mu;
    p.b = tr_b;
    const csslm::ThresholdMode thr = csslm::threshold_from_string(tr_threshold);

    if (!tr_cv.empty()) {
      const csslm::Dataset deval =
          tr_cv_data.empty() ? d : load_data(tr_cv_data, tr_format, tr_relabel);
      rc = run_cv(tr_cv, d, deval, spec, p, thr, tr_tol);
      return;
    }

    csslm::Model mo;
    if (tr_solver == "sgd") {
      if (spec.kind != csslm::KernelKind::Linear)
        throw std::invalid_argument("--solver sgd supports the linear kernel only");
      csslm::SgdConfig cfg;
      cfg.iterations = tr_iterations;
      cfg.seed = tr_seed;
      cfg.averaging = !tr_no_averaging;
      cfg.variant = tr_variant == "revisit" ? csslm::SgdVariant::Revisit : csslm::SgdVariant::Plain;
      cfg.log = &std::cerr;
      mo = csslm::pegasos_train(d, p, cfg);
      mo.threshold = thr;
    } else {
      csslm::TrainOptions topt;
      topt.tol = tr_tol;
      topt.threshold = thr;
      mo = csslm::train(d, spec, p, topt);
    }
    print_model_summary(mo, p, std::cout);
    if (!tr_out.empty()) {
      csslm::save_model(mo, tr_out);
      std::cout << "model written to " << tr_out << "\n";
    }
  });

  // predict ----------------------------------------------------------
  auto* predict = app.add_subcommand("predict", "Score points with a trained model");
  predict->fallthrough();
  std::string pr_model, pr_data, pr_format = "auto", pr_threshold, pr_out;
  bool pr_relabel = false, pr_unlabeled = false;
  predict->add_option("--model", pr_model, "model JSON from train")->required();
  predict->add_option("--data", pr_data, "points to score")->required();
  predict->add_option("--format", pr_format, "data format")
      ->check(CLI::IsMember({"auto", "csv", "libsvm"}));
  predict->add_flag("--relabel-banana", pr_relabel, "apply the banana relabel rule before scoring");
  predict->add_flag("--unlabeled", pr_unlabeled, "CSV has no label column; score every row as-is");
  predict->add_option("--threshold", pr_threshold, "override the model's stored threshold")
      ->check(CLI::IsMember({"inner", "mid", "outer"}));
  predict->add_option("-o,--out", pr_out, "write the score CSV here instead of stdout");
  predict->callback([&] {
    csslm::Model mo = csslm::load_model(pr_model);
    if (!pr_threshold.empty()) mo.threshold = csslm::threshold_from_string(pr_threshold);
    OutputFile out(pr_out);
    out.stream() << "index,score,label\n";

    if (pr_unlabeled) {
      const Eigen::MatrixXd X = load_points_csv(pr_data);
      const auto preds = csslm::predict(mo, X);
      for (size_t i = 0; i < preds.size(); ++i)
        out.stream() << i << "," << fmt(preds[i].score) << "," << preds[i].label << "\n";
      return;
    }

    const csslm::Dataset d = load_data(pr_data, pr_format, pr_relabel);
    const auto preds = csslm::predict(mo, d.x);
    std::vector<int> order(d.l());
    for (int i = 0; i < d.l(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return d.source_row[a] < d.source_row[b]; });
    ErrorCounts counts;
    for (int i : order) {
      out.stream() << d.source_row[i] << "," << fmt(preds[i].score) << "," << preds[i].label
                   << "\n";
      counts.add(d.y[i], preds[i].label);
    }
    counts.print(std::cerr);
  });

  // verify -----------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "Check KKT optimality and the nu-property");
  verify->fallthrough();
  std::string ve_model, ve_data, ve_format = "auto", ve_gram;
  bool ve_relabel = false;
  double ve_tol = 1e-6;
  verify->add_option("--model", ve_model, "model JSON from train")->required();
  verify->add_option("--data", ve_data, "the training data the model was fit on")->required();
  verify->add_option("--format", ve_format, "data format")
      ->check(CLI::IsMember({"auto", "csv", "libsvm"}));
  verify->add_flag("--relabel-banana", ve_relabel, "apply the banana relabel rule first");
  verify->add_option("--gram", ve_gram, "Gram matrix CSV for precomputed-kernel models");
  verify->add_option("--tol", ve_tol,
                     "base KKT residual tolerance, scaled by (1 + |dual objective|)");
  verify->callback([&] {
    csslm::Model mo = csslm::load_model(ve_model);
    const csslm::Dataset d = load_data(ve_data, ve_format, ve_relabel);
    if (d.l() != mo.l || d.m != mo.m || d.n != mo.n || d.dim() != mo.dim)
      throw csslm::DataError(
          "data does not match the model: expected l=" + std::to_string(mo.l) + " m=" +
          std::to_string(mo.m) + " n=" + std::to_string(mo.n) + " dim=" + std::to_string(mo.dim) +
          ", got l=" + std::to_string(d.l()) + " m=" + std::to_string(d.m) + " n=" +
          std::to_string(d.n) + " dim=" + std::to_string(d.dim()));
    if (mo.kernel.kind == csslm::KernelKind::Precomputed) {
      if (ve_gram.empty())
        throw std::invalid_argument("model uses a precomputed kernel; pass --gram");
      mo.kernel.matrix = permuted_gram(ve_gram, d);
    }
    const Eigen::MatrixXd K = csslm::gram(mo.kernel, d);
    const csslm::KktReport kkt = csslm::check_kkt(mo, K, d, mo.hyper);
    print_kkt(kkt, std::cout);
    print_uniqueness(mo.uniqueness, std::cout);
    csslm::NuReport nu;
    if (mo.kernel.kind == csslm::KernelKind::Precomputed) {
      nu.applicable = false;
      nu.note = "nu-property needs kernel evaluations; precomputed Gram carries none";
    } else {
      nu = csslm::nu_property(mo);
    }
    print_nu(nu, std::cout);

    const double eff_tol = ve_tol * (1.0 + std::abs(mo.dual.objective));
    const bool kkt_ok = kkt.max_residual <= eff_tol;
    const bool nu_ok = !nu.applicable || nu.all_hold;
    if (kkt_ok && nu_ok) {
      std::cout << "verification passed (max KKT residual " << fmt(kkt.max_residual) << " <= "
                << fmt(eff_tol) << ")\n";
    } else {
      if (!kkt_ok)
        std::cout << "verification FAILED: max KKT residual " << fmt(kkt.max_residual) << " > "
                  << fmt(eff_tol) << "\n";
      if (!nu_ok) std::cout << "verification FAILED: nu-property violated\n";
      rc = 1;
    }
  });

  // regime -----------------------------------------------------------
  auto* regime = app.add_subcommand("regime", "Report which optimization regime applies");
  regime->fallthrough();
  std::string rg_data, rg_format = "auto";
  double rg_nu = 0.5, rg_mu = 0.0, rg_b = 1.0;
  bool rg_relabel = false;
  regime->add_option("--data", rg_data, "data file (only the label counts matter)")->required();
  regime->add_option("--format", rg_format, "data format")
      ->check(CLI::IsMember({"auto", "csv", "libsvm"}));
  regime->add_flag("--relabel-banana", rg_relabel, "apply the banana relabel rule first");
  regime->add_option("--nu", rg_nu, "volume/loss trade-off, > 0");
  regime->add_option("--mu", rg_mu, "volume/margin trade-off, >= 0");
  regime->add_option("--b", rg_b, "negative-loss weight, >= 1");
  regime->callback([&] {
    const csslm::Dataset d = load_data(rg_data, rg_format, rg_relabel);
    csslm::HyperParams p;
    p.nu = rg_nu;
    p.mu = rg_mu;
    p.b = rg_b;
    const csslm::Regime reg = csslm::classify_regime(p, d.m, d.n);
    std::cout << "m = " << d.m << ", n = " << d.n << ", l = " << d.l() << "\n";
    std::cout << csslm::describe_regime(reg, p, d.m, d.n) << "\n";
    if (reg.kind == csslm::RegimeKind::Unbounded) rc = 2;
  });

  // export-boundary ----------------------------------------------------
  auto* boundary = app.add_subcommand("export-boundary",
                                      "Sample d^2 and score on a 2-D grid for contour plotting");
  boundary->fallthrough();
  std::string bo_model, bo_threshold, bo_out;
  double bo_xmin = -3.0, bo_xmax = 3.0, bo_ymin = -3.0, bo_ymax = 3.0;
  int bo_resolution = 100;
  boundary->add_option("--model", bo_model, "model JSON from train")->required();
  boundary->add_option("--xmin", bo_xmin, "grid left edge");
  boundary->add_option("--xmax", bo_xmax, "grid right edge");
  boundary->add_option("--ymin", bo_ymin, "grid bottom edge");
  boundary->add_option("--ymax", bo_ymax, "grid top edge");
  boundary->add_option("--resolution", bo_resolution, "points per axis")
      ->check(CLI::PositiveNumber);
  boundary->add_option("--threshold", bo_threshold, "override the model's stored threshold")
      ->check(CLI::IsMember({"inner", "mid", "outer"}));
  boundary->add_option("-o,--out", bo_out, "write the grid CSV here instead of stdout");
  boundary->callback([&] {
    csslm::Model mo = csslm::load_model(bo_model);
    if (mo.dim != 2)
      throw std::invalid_argument("2-D input required; model was trained on " +
                                  std::to_string(mo.dim) + "-dimensional data");
    if (!bo_threshold.empty()) mo.threshold = csslm::threshold_from_string(bo_threshold);
    OutputFile out(bo_out);
    out.stream() << "x1,x2,d2,score\n";
    const int R = bo_resolution;
    Eigen::VectorXd q(2);
    for (int iy = 0; iy < R; ++iy) {
      q(1) = R == 1 ? 0.5 * (bo_ymin + bo_ymax) : bo_ymin + iy * (bo_ymax - bo_ymin) / (R - 1);
      for (int ix = 0; ix < R; ++ix) {
        q(0) = R == 1 ? 0.5 * (bo_xmin + bo_xmax) : bo_xmin + ix * (bo_xmax - bo_xmin) / (R - 1);
        const csslm::Prediction pr = csslm::predict_point(mo, q);
        out.stream() << fmt(q(0)) << "," << fmt(q(1)) << "," << fmt(pr.dist2) << ","
                     << fmt(pr.score) << "\n";
      }
    }
  });

  // oracle (hidden): slow reference solver for cross-checking ----------
  auto* oracle = app.add_subcommand("oracle", "Subgradient reference solver");
  oracle->fallthrough();
  oracle->group("");
  std::string or_data, or_format = "auto", or_kernel = "linear";
  double or_nu = 0.5, or_mu = 0.0, or_b = 1.0, or_tol = 1e-4, or_step = 1.0;
  int or_restarts = 4, or_degree = 3;
  double or_coef0 = 1.0;
  long long or_iterations = 1000000;
  bool or_relabel = false;
  oracle->add_option("--data", or_data, "training data")->required();
  oracle->add_option("--format", or_format, "data format")
      ->check(CLI::IsMember({"auto", "csv", "libsvm"}));
  oracle->add_flag("--relabel-banana", or_relabel, "apply the banana relabel rule first");
  oracle->add_option("--kernel", or_kernel, "kernel with an explicit feature map")
      ->check(CLI::IsMember({"linear", "poly", "polynomial"}));
  oracle->add_option("--degree", or_degree, "polynomial degree");
  oracle->add_option("--coef0", or_coef0, "polynomial offset");
  oracle->add_option("--nu", or_nu, "volume/loss trade-off, > 0");
  oracle->add_option("--mu", or_mu, "volume/margin trade-off, >= 0");
  oracle->add_option("--b", or_b, "negative-loss weight, >= 1");
  oracle->add_option("--restarts", or_restarts, "restart count (first two are deterministic)");
  oracle->add_option("--iterations", or_iterations, "subgradient steps per restart");
  oracle->add_option("--step-scale", or_step, "step size multiplier");
  oracle->add_option("--tol", or_tol, "restart agreement tolerance");
  oracle->callback([&] {
    csslm::Dataset d = load_data(or_data, or_format, or_relabel);
    const csslm::KernelSpec spec =
        make_kernel(or_kernel, 1.0, or_degree, or_coef0, "", d);
    if (spec.kind != csslm::KernelKind::Linear) d.x = csslm::feature_matrix(spec, d);
    csslm::HyperParams p;
    p.nu = or_nu;
    p.mu = or_mu;
    p.b = or_b;
    csslm::OracleConfig cfg;
    cfg.restarts = or_restarts;
    cfg.iterations = or_iterations;
    cfg.step_scale = or_step;
    cfg.tol = or_tol;
    const csslm::OracleResult res = csslm::brute_force_primal(d, p, cfg);
    std::cout << "objective g = " << fmt(res.objective) << "\n";
    std::cout << "r = " << fmt(res.r) << "\n";
    std::cout << "t = " << fmt(res.t) << "\n";
    if (res.a.size() <= 12) {
      std::cout << "a =";
      for (int i = 0; i < res.a.size(); ++i) std::cout << " " << fmt(res.a(i));
      std::cout << "\n";
    }
    std::cout << "restart objectives:";
    for (double v : res.restart_objectives) std::cout << " " << fmt(v);
    std::cout << "\n";
    std::cout << "spread = " << fmt(res.spread) << " ("
              << (res.agreed ? "agreed" : "DISAGREED") << ")\n";
    if (!res.agreed) rc = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const csslm::UnboundedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const csslm::SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
