#pragma once

#include <Eigen/Dense>
#include <string>

namespace lmdl {

enum class KernelKind { linear, rbf };

KernelKind parse_kernel_kind(const std::string& name);
std::string to_string(KernelKind kind);

/// A kernel function together with the reference points that define kernel
/// coordinates: a point maps to its vector of kernel evaluations against
/// every reference column.
struct KernelDescriptor {
  KernelKind kind = KernelKind::rbf;
  double sigma = 1.0;               // RBF width, unused for linear
  Eigen::MatrixXd reference_points; // d x M_ref

  int reference_count() const { return static_cast<int>(reference_points.cols()); }
};

/// linear -> a.b; rbf -> exp(-||a - b||^2 / (2 sigma^2)). Symmetric.
double kernel_eval(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                   const KernelDescriptor& kd);

/// Kernel coordinates of `points` (d x N): entry (r, j) is the kernel value
/// between reference r and point j, so the result is M_ref x N.
Eigen::MatrixXd to_kernel_coordinates(const Eigen::MatrixXd& points,
                                      const KernelDescriptor& kd);

/// Squared distance ||factor_b^T (k_x - k_p)||^2 between two points given by
/// their kernel coordinates, under a metric factored in coordinate space.
double kernelized_distance(const Eigen::VectorXd& k_x, const Eigen::VectorXd& k_p,
                           const Eigen::MatrixXd& factor_b);

}  // namespace lmdl
