#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include <csslm/errors.hpp>

namespace csslm {

// Labeled point set in canonical order: rows [0, m) carry label +1,
// rows [m, l) carry label -1. Downstream index formulas (i <= m versus
// i > m in the duals) rely on this ordering and never branch on labels.
struct Dataset {
  Eigen::MatrixXd x;             // one point per row
  std::vector<int> y;            // +1 / -1, canonical order
  int m = 0;                     // positive count
  int n = 0;                     // negative count
  std::vector<int> source_row;   // canonical index -> row in the original input

  int l() const { return m + n; }
  int dim() const { return static_cast<int>(x.cols()); }
};

namespace detail {

inline bool parse_double(std::string_view field, double& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  while (last != first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
  if (last - first > 1 && *first == '+' &&
      ((first[1] >= '0' && first[1] <= '9') || first[1] == '.'))
    ++first;
  if (first == last) return false;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline int parse_label(double v, int row) {
  if (v == 1.0) return 1;
  if (v == -1.0) return -1;
  throw DataError("row " + std::to_string(row) + ": label outside {+1,-1}");
}

}  // namespace detail

// Reorders points so positives come first (stable within each class) and
// validates the Dataset invariants. `source` maps to the caller's row ids;
// leave it empty to use 0..l-1.
inline Dataset make_dataset(const Eigen::MatrixXd& points, const std::vector<int>& labels,
                            std::vector<int> source = {}) {
  const int l = static_cast<int>(points.rows());
  if (l == 0) throw DataError("empty dataset");
  if (static_cast<int>(labels.size()) != l) throw DataError("points/labels count mismatch");
  if (points.cols() < 1) throw DataError("feature dimension must be >= 1");
  if (!points.allFinite()) throw DataError("non-finite feature value");
  if (source.empty()) {
    source.resize(l);
    for (int i = 0; i < l; ++i) source[i] = i;
  }

  Dataset d;
  d.x.resize(l, points.cols());
  d.y.reserve(l);
  d.source_row.reserve(l);
  for (int pass = 0; pass < 2; ++pass) {
    const int want = pass == 0 ? 1 : -1;
    for (int i = 0; i < l; ++i) {
      if (labels[i] != 1 && labels[i] != -1)
        throw DataError("row " + std::to_string(source[i]) + ": label outside {+1,-1}");
      if (labels[i] != want) continue;
      d.x.row(d.y.size()) = points.row(i);
      d.y.push_back(want);
      d.source_row.push_back(source[i]);
    }
    if (pass == 0) d.m = static_cast<int>(d.y.size());
  }
  d.n = l - d.m;
  if (d.m == 0) throw DataError("no positive examples (m = 0)");
  return d;
}

// CSV: comma-separated, last column is the label, optional header row
// (detected by a non-numeric first field).
inline Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  int lineno = 0;
  bool first_data_line = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string field;
    int col = 0;
    bool header = false;
    while (std::getline(ss, field, ',')) {
      ++col;
      double v;
      if (!detail::parse_double(field, v)) {
        if (first_data_line) { header = true; break; }
        throw DataError("parse error at row " + std::to_string(lineno) +
                        ", column " + std::to_string(col));
      }
      vals.push_back(v);
    }
    if (header) continue;
    first_data_line = false;
    if (vals.size() < 2)
      throw DataError("row " + std::to_string(lineno) + ": need at least one feature and a label");
    if (!rows.empty() && vals.size() != rows.front().size() + 1)
      throw DataError("row " + std::to_string(lineno) + ": inconsistent dimension");
    labels.push_back(detail::parse_label(vals.back(), lineno));
    vals.pop_back();
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw DataError("no data rows in " + path);

  Eigen::MatrixXd pts(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) pts(i, j) = rows[i][j];
  return make_dataset(pts, labels);
}

// LIBSVM sparse lines: "label idx:val idx:val ...", 1-based indices,
// missing indices are zero. Dimension is the max index seen in the file.
inline Dataset load_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<int> labels;
  std::string line;
  int lineno = 0;
  int max_index = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;
    double lab;
    if (!detail::parse_double(tok, lab))
      throw DataError("parse error at row " + std::to_string(lineno) + ": bad label");
    labels.push_back(detail::parse_label(lab, lineno));
    std::vector<std::pair<int, double>> feats;
    while (ss >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw DataError("parse error at row " + std::to_string(lineno) + ": expected idx:val");
      double idx_d, val;
      if (!detail::parse_double(tok.substr(0, colon), idx_d) ||
          !detail::parse_double(tok.substr(colon + 1), val) ||
          idx_d != std::floor(idx_d) || idx_d < 1)
        throw DataError("parse error at row " + std::to_string(lineno) + ": bad idx:val pair");
      const int idx = static_cast<int>(idx_d);
      max_index = std::max(max_index, idx);
      feats.emplace_back(idx, val);
    }
    rows.push_back(std::move(feats));
  }
  if (rows.empty()) throw DataError("no data rows in " + path);
  if (max_index == 0) throw DataError("no features found in " + path);

  Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(rows.size(), max_index);
  for (size_t i = 0; i < rows.size(); ++i)
    for (auto [idx, val] : rows[i]) pts(i, idx - 1) = val;
  return make_dataset(pts, labels);
}

inline Dataset load_dataset(const std::string& path, const std::string& format) {
  if (format == "csv") return load_csv(path);
  if (format == "libsvm") return load_libsvm(path);
  if (format == "auto") {
    const auto dot = path.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    return ext == "csv" ? load_csv(path) : load_libsvm(path);
  }
  throw DataError("unknown format: " + format);
}

// Writes canonical order, no header. load(save(d)) reproduces (points,
// labels) up to the canonical reordering that load applies anyway.
inline void save_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out.precision(17);
  for (int i = 0; i < d.l(); ++i) {
    for (int j = 0; j < d.dim(); ++j) out << d.x(i, j) << ',';
    out << d.y[i] << '\n';
  }
}

// Relabels 2-D points: strictly above the line x2 + (3/7)(x1 - 3) = 0
// becomes negative; points exactly on the line keep their label.
inline Dataset relabel_banana(const Dataset& d) {
  if (d.dim() != 2) throw DataError("banana relabel requires 2-D data");
  std::vector<int> labels(d.y);
  for (int i = 0; i < d.l(); ++i) {
    if (d.x(i, 1) + (3.0 / 7.0) * (d.x(i, 0) - 3.0) > 0.0) labels[i] = -1;
  }
  return make_dataset(d.x, labels, d.source_row);
}

}  // namespace csslm
