#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace lmdl {

/// A labeled point collection. Points are the columns of `features`
/// (d rows, M columns); labels take values in 1..class_count and every
/// class occurs at least once.
struct Dataset {
  Eigen::MatrixXd features;                // d x M
  std::vector<int> labels;                 // length M, values in 1..K
  std::vector<std::string> feature_names;  // optional, length d when present
  int class_count = 0;

  int dim() const { return static_cast<int>(features.rows()); }
  int size() const { return static_cast<int>(features.cols()); }

  /// Throws std::invalid_argument if any structural invariant is broken.
  void validate() const;

  /// Points of `ds` whose positions appear in `indices`, in that order.
  Dataset subset(const std::vector<int>& indices) const;
};

/// Per-feature mean and standard deviation fitted on one dataset, applied
/// to any other so test folds never leak into the statistics.
struct ScalingRecord {
  Eigen::VectorXd mean;  // length d
  Eigen::VectorXd std;   // length d; entries of 0 mark constant features

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& points) const;
  Dataset apply(const Dataset& ds) const;
};

/// Centers each feature and scales to unit sample standard deviation
/// (divisor M-1). Constant features map to zero.
std::pair<Dataset, ScalingRecord> standardize(const Dataset& ds);

/// One stratified assignment of every point to a test fold.
struct FoldPlan {
  std::vector<int> fold_assignments;  // length M, values in 0..fold_count-1
  int fold_count = 0;
  int repeat_index = 0;
  std::uint64_t seed = 0;

  std::vector<int> test_indices(int fold) const;
  std::vector<int> train_indices(int fold) const;
};

/// `repeats` independent stratified fold plans, deterministic in `seed`.
/// Throws if any class has fewer than `fold_count` members.
std::vector<FoldPlan> make_folds(const Dataset& ds, int fold_count, int repeats,
                                 std::uint64_t seed);

/// Loads a comma-separated file (first row is the header). The label column
/// may be given by name or by zero-based index; columns listed in
/// `categorical_columns` are expanded to one-hot groups, one feature per
/// distinct value in first-appearance order. Labels are re-encoded to 1..K
/// in first-appearance order.
Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::vector<std::string>& categorical_columns = {});

/// Writes the loader's CSV format back out, labels in a final `label` column.
void save_csv(const Dataset& ds, const std::string& path);

enum class SyntheticKind { two_gaussians, concentric_circles, helix };

SyntheticKind parse_synthetic_kind(const std::string& name);
std::string to_string(SyntheticKind kind);

/// Seeded synthetic datasets:
///  - two_gaussians: two spherical Gaussians of std `noise` centered at
///    (-offset, 0) and (+offset, 0);
///  - concentric_circles: two classes of n/2 points on radii 1 and 2 with
///    Gaussian coordinate noise of std `noise`;
///  - helix: five intertwined 3D helix strands, one class per strand, with
///    Gaussian coordinate noise of std `noise`.
Dataset generate_synthetic(SyntheticKind kind, int n, double noise,
                           std::uint64_t seed, double offset = 3.0);

}  // namespace lmdl
