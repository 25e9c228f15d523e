#pragma once

#include <Eigen/Dense>
#include <vector>

namespace lmdl {

/// Low-rank factor of one prototype's metric. The implied matrix
/// factor * factor^T is symmetric PSD by construction, so distances are
/// always computed through the factor and the full matrix is never formed.
struct FactorMetric {
  Eigen::MatrixXd factor;  // d x p

  int rank() const { return static_cast<int>(factor.cols()); }
};

/// Prototype positions (columns), their class labels, and one FactorMetric
/// per prototype, index-aligned. All metrics share the same rank.
struct PrototypeSet {
  Eigen::MatrixXd positions;  // d x S
  std::vector<int> labels;    // length S, values in 1..K
  std::vector<FactorMetric> metrics;

  int size() const { return static_cast<int>(positions.cols()); }
  int dim() const { return static_cast<int>(positions.rows()); }
  int rank() const { return metrics.empty() ? 0 : metrics.front().rank(); }
};

/// Squared local Mahalanobis distance ||factor^T (x - p_s)||^2 under the
/// metric of prototype `proto_index`. Always non-negative.
double squared_distance(const Eigen::VectorXd& x, int proto_index,
                        const PrototypeSet& ps);

struct NearestHit {
  int index = -1;
  double distance = 0.0;
};

/// Nearest prototype with label == `label`, each candidate evaluated under
/// its own metric; ties break toward the lowest index. Throws if the class
/// has no prototype.
NearestHit nearest_same_class(const Eigen::VectorXd& x, int label,
                              const PrototypeSet& ps);

/// Nearest prototype with label != `label`; otherwise as above.
NearestHit nearest_diff_class(const Eigen::VectorXd& x, int label,
                              const PrototypeSet& ps);

/// The p-dimensional image factor^T (x - p_s); its squared norm equals
/// squared_distance(x, proto_index, ps).
Eigen::VectorXd project(const Eigen::VectorXd& x, int proto_index,
                        const PrototypeSet& ps);

}  // namespace lmdl
