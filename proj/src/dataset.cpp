#include "lmdl/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "lmdl/rng.hpp"

namespace lmdl {

void Dataset::validate() const {
  if (dim() < 1) throw std::invalid_argument("dataset has no features");
  if (size() < 2) throw std::invalid_argument("dataset needs at least 2 points");
  if (class_count < 2) throw std::invalid_argument("dataset needs at least 2 classes");
  if (static_cast<int>(labels.size()) != size())
    throw std::invalid_argument("label count does not match point count");
  if (!feature_names.empty() && static_cast<int>(feature_names.size()) != dim())
    throw std::invalid_argument("feature name count does not match dimensionality");
  std::vector<int> seen(class_count, 0);
  for (int lab : labels) {
    if (lab < 1 || lab > class_count)
      throw std::invalid_argument("label outside 1..K");
    seen[lab - 1] = 1;
  }
  for (int k = 0; k < class_count; ++k)
    if (!seen[k])
      throw std::invalid_argument("class " + std::to_string(k + 1) + " has no points");
  if (!features.allFinite())
    throw std::invalid_argument("dataset contains non-finite feature values");
}

Dataset Dataset::subset(const std::vector<int>& indices) const {
  Dataset out;
  out.features.resize(dim(), static_cast<Eigen::Index>(indices.size()));
  out.labels.reserve(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    int i = indices[j];
    if (i < 0 || i >= size()) throw std::out_of_range("subset index out of range");
    out.features.col(static_cast<Eigen::Index>(j)) = features.col(i);
    out.labels.push_back(labels[i]);
  }
  out.feature_names = feature_names;
  out.class_count = class_count;
  return out;
}

Eigen::VectorXd ScalingRecord::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    out[i] = std[i] > 0.0 ? (x[i] - mean[i]) / std[i] : 0.0;
  return out;
}

Eigen::MatrixXd ScalingRecord::apply(const Eigen::MatrixXd& points) const {
  Eigen::MatrixXd out(points.rows(), points.cols());
  for (Eigen::Index j = 0; j < points.cols(); ++j)
    out.col(j) = apply(Eigen::VectorXd(points.col(j)));
  return out;
}

Dataset ScalingRecord::apply(const Dataset& ds) const {
  Dataset out = ds;
  out.features = apply(ds.features);
  return out;
}

std::pair<Dataset, ScalingRecord> standardize(const Dataset& ds) {
  if (ds.size() < 2) throw std::invalid_argument("standardize needs at least 2 points");
  const Eigen::Index d = ds.features.rows();
  const double m = static_cast<double>(ds.features.cols());
  ScalingRecord rec;
  rec.mean = ds.features.rowwise().mean();
  rec.std.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double ss = (ds.features.row(i).array() - rec.mean[i]).square().sum();
    double var = ss / (m - 1.0);  // sample convention
    rec.std[i] = var > 0.0 ? std::sqrt(var) : 0.0;
  }
  return {rec.apply(ds), rec};
}

std::vector<int> FoldPlan::test_indices(int fold) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < fold_assignments.size(); ++i)
    if (fold_assignments[i] == fold) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> FoldPlan::train_indices(int fold) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < fold_assignments.size(); ++i)
    if (fold_assignments[i] != fold) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<FoldPlan> make_folds(const Dataset& ds, int fold_count, int repeats,
                                 std::uint64_t seed) {
  ds.validate();
  if (fold_count < 2) throw std::invalid_argument("fold count must be at least 2");
  if (repeats < 1) throw std::invalid_argument("repeats must be positive");

  std::vector<std::vector<int>> by_class(ds.class_count);
  for (int i = 0; i < ds.size(); ++i) by_class[ds.labels[i] - 1].push_back(i);
  for (int k = 0; k < ds.class_count; ++k)
    if (static_cast<int>(by_class[k].size()) < fold_count)
      throw std::invalid_argument("class " + std::to_string(k + 1) + " has fewer than " +
                                  std::to_string(fold_count) + " members");

  std::vector<FoldPlan> plans;
  plans.reserve(repeats);
  for (int r = 0; r < repeats; ++r) {
    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    FoldPlan plan;
    plan.fold_assignments.assign(ds.size(), -1);
    plan.fold_count = fold_count;
    plan.repeat_index = r;
    plan.seed = seed;
    // Deal each class round-robin, carrying the rotation across classes so
    // overall fold sizes also differ by at most one.
    int next_fold = 0;
    for (auto members : by_class) {
      std::shuffle(members.begin(), members.end(), rng);
      for (int idx : members) {
        plan.fold_assignments[idx] = next_fold;
        next_fold = (next_fold + 1) % fold_count;
      }
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) return false;
  return std::isfinite(out);
}

int resolve_column(const std::string& name_or_index,
                   const std::vector<std::string>& header) {
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name_or_index) return static_cast<int>(c);
  // Fall back to a zero-based index.
  int idx = -1;
  try {
    std::size_t pos = 0;
    idx = std::stoi(name_or_index, &pos);
    if (pos != name_or_index.size()) idx = -1;
  } catch (const std::exception&) {
    idx = -1;
  }
  if (idx >= 0 && idx < static_cast<int>(header.size())) return idx;
  throw std::invalid_argument("column '" + name_or_index + "' not found in header");
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::vector<std::string>& categorical_columns) {
  std::ifstream file(path);
  if (!file.is_open()) throw std::runtime_error("cannot open file: " + path);

  std::string line;
  if (!std::getline(file, line)) throw std::runtime_error("empty CSV: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_row(line);
  const std::size_t arity = header.size();
  if (arity < 2) throw std::runtime_error("CSV needs a label column and at least one feature");

  const int label_col = resolve_column(label_column, header);
  std::vector<bool> is_categorical(arity, false);
  for (const auto& c : categorical_columns) {
    int idx = resolve_column(c, header);
    if (idx == label_col)
      throw std::invalid_argument("label column cannot be categorical-expanded");
    is_categorical[idx] = true;
  }

  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  while (std::getline(file, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cells = split_row(line);
    if (cells.size() != arity)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected " + std::to_string(arity) + " cells, got " +
                               std::to_string(cells.size()));
    rows.push_back(std::move(cells));
  }
  if (rows.size() < 2) throw std::runtime_error("CSV has fewer than 2 data rows");

  // First-appearance value dictionaries for categorical columns and labels.
  std::vector<std::vector<std::string>> cat_values(arity);
  std::vector<std::unordered_map<std::string, int>> cat_index(arity);
  std::vector<std::string> class_names;
  std::unordered_map<std::string, int> class_index;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < arity; ++c) {
      if (static_cast<int>(c) == label_col) {
        const std::string v = trim(row[c]);
        if (v.empty()) throw std::runtime_error("empty label value");
        if (class_index.emplace(v, static_cast<int>(class_names.size()) + 1).second)
          class_names.push_back(v);
      } else if (is_categorical[c]) {
        const std::string v = trim(row[c]);
        if (v.empty()) throw std::runtime_error("empty value in categorical column '" +
                                                header[c] + "'");
        if (cat_index[c].emplace(v, static_cast<int>(cat_values[c].size())).second)
          cat_values[c].push_back(v);
      }
    }
  }
  if (class_names.size() < 2)
    throw std::runtime_error("dataset has a single class: '" + class_names.front() + "'");

  Dataset ds;
  ds.class_count = static_cast<int>(class_names.size());
  for (std::size_t c = 0; c < arity; ++c) {
    if (static_cast<int>(c) == label_col) continue;
    if (is_categorical[c]) {
      for (const auto& v : cat_values[c]) ds.feature_names.push_back(header[c] + "=" + v);
    } else {
      ds.feature_names.push_back(header[c]);
    }
  }

  const int d = static_cast<int>(ds.feature_names.size());
  ds.features.setZero(d, static_cast<Eigen::Index>(rows.size()));
  ds.labels.resize(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    int f = 0;
    for (std::size_t c = 0; c < arity; ++c) {
      if (static_cast<int>(c) == label_col) {
        ds.labels[r] = class_index.at(trim(rows[r][c]));
        continue;
      }
      if (is_categorical[c]) {
        int hot = cat_index[c].at(trim(rows[r][c]));
        ds.features(f + hot, static_cast<Eigen::Index>(r)) = 1.0;
        f += static_cast<int>(cat_values[c].size());
      } else {
        double v;
        if (!parse_double(rows[r][c], v))
          throw std::runtime_error(path + ":" + std::to_string(r + 2) +
                                   ": non-numeric value '" + trim(rows[r][c]) +
                                   "' in column '" + header[c] + "'");
        ds.features(f, static_cast<Eigen::Index>(r)) = v;
        ++f;
      }
    }
  }
  ds.validate();
  return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream file(path);
  if (!file.is_open()) throw std::runtime_error("cannot write file: " + path);
  for (int i = 0; i < ds.dim(); ++i) {
    if (!ds.feature_names.empty())
      file << ds.feature_names[i];
    else
      file << "f" << i;
    file << ',';
  }
  file << "label\n";
  char buf[64];
  for (int j = 0; j < ds.size(); ++j) {
    for (int i = 0; i < ds.dim(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.features(i, j));
      file << buf << ',';
    }
    file << ds.labels[j] << '\n';
  }
}

SyntheticKind parse_synthetic_kind(const std::string& name) {
  if (name == "two_gaussians") return SyntheticKind::two_gaussians;
  if (name == "concentric_circles") return SyntheticKind::concentric_circles;
  if (name == "helix") return SyntheticKind::helix;
  throw std::invalid_argument("unknown synthetic dataset kind: '" + name + "'");
}

std::string to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::two_gaussians: return "two_gaussians";
    case SyntheticKind::concentric_circles: return "concentric_circles";
    case SyntheticKind::helix: return "helix";
  }
  return "?";
}

Dataset generate_synthetic(SyntheticKind kind, int n, double noise,
                           std::uint64_t seed, double offset) {
  if (n < 4) throw std::invalid_argument("synthetic datasets need n >= 4");
  if (noise < 0.0) throw std::invalid_argument("noise must be non-negative");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uangle(0.0, 2.0 * std::numbers::pi);

  Dataset ds;
  switch (kind) {
    case SyntheticKind::two_gaussians: {
      ds.features.resize(2, n);
      ds.labels.resize(n);
      ds.class_count = 2;
      ds.feature_names = {"x", "y"};
      for (int j = 0; j < n; ++j) {
        int cls = j < n / 2 ? 1 : 2;
        double cx = cls == 1 ? -offset : offset;
        ds.features(0, j) = cx + noise * gauss(rng);
        ds.features(1, j) = noise * gauss(rng);
        ds.labels[j] = cls;
      }
      break;
    }
    case SyntheticKind::concentric_circles: {
      ds.features.resize(2, n);
      ds.labels.resize(n);
      ds.class_count = 2;
      ds.feature_names = {"x", "y"};
      for (int j = 0; j < n; ++j) {
        int cls = j < n / 2 ? 1 : 2;
        double radius = cls == 1 ? 1.0 : 2.0;
        double a = uangle(rng);
        ds.features(0, j) = radius * std::cos(a) + noise * gauss(rng);
        ds.features(1, j) = radius * std::sin(a) + noise * gauss(rng);
        ds.labels[j] = cls;
      }
      break;
    }
    case SyntheticKind::helix: {
      constexpr int strands = 5;
      if (n < 2 * strands)
        throw std::invalid_argument("helix needs at least " + std::to_string(2 * strands) +
                                    " points");
      ds.features.resize(3, n);
      ds.labels.resize(n);
      ds.class_count = strands;
      ds.feature_names = {"x", "y", "z"};
      const double turns = 2.0;
      for (int j = 0; j < n; ++j) {
        int cls = j % strands + 1;
        int step = j / strands;
        int per_strand = (n + strands - 1) / strands;
        double t = turns * 2.0 * std::numbers::pi * step / std::max(1, per_strand - 1);
        double phase = 2.0 * std::numbers::pi * (cls - 1) / strands;
        ds.features(0, j) = std::cos(t + phase) + noise * gauss(rng);
        ds.features(1, j) = std::sin(t + phase) + noise * gauss(rng);
        ds.features(2, j) = t / (turns * std::numbers::pi) - 1.0 + noise * gauss(rng);
        ds.labels[j] = cls;
      }
      break;
    }
  }
  return ds;
}

}  // namespace lmdl
