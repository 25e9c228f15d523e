#include "lmdl/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace lmdl {

KernelKind parse_kernel_kind(const std::string& name) {
  if (name == "linear") return KernelKind::linear;
  if (name == "rbf") return KernelKind::rbf;
  throw std::invalid_argument("unknown kernel kind: '" + name + "'");
}

std::string to_string(KernelKind kind) {
  return kind == KernelKind::linear ? "linear" : "rbf";
}

double kernel_eval(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                   const KernelDescriptor& kd) {
  if (a.size() != b.size()) throw std::invalid_argument("kernel_eval: size mismatch");
  switch (kd.kind) {
    case KernelKind::linear:
      return a.dot(b);
    case KernelKind::rbf: {
      if (kd.sigma <= 0.0) throw std::invalid_argument("rbf kernel needs sigma > 0");
      return std::exp(-(a - b).squaredNorm() / (2.0 * kd.sigma * kd.sigma));
    }
  }
  return 0.0;
}

Eigen::MatrixXd to_kernel_coordinates(const Eigen::MatrixXd& points,
                                      const KernelDescriptor& kd) {
  if (kd.reference_points.size() == 0)
    throw std::invalid_argument("kernel descriptor has no reference points");
  if (points.rows() != kd.reference_points.rows())
    throw std::invalid_argument("points and reference points disagree on dimension");

  const Eigen::Index m_ref = kd.reference_points.cols();
  const Eigen::Index n = points.cols();
  if (kd.kind == KernelKind::linear) return kd.reference_points.transpose() * points;

  if (kd.sigma <= 0.0) throw std::invalid_argument("rbf kernel needs sigma > 0");
  // Differences are formed directly so coincident points evaluate to
  // exactly 1, which the Gram expansion ||r||^2+||x||^2-2r.x cannot promise.
  Eigen::MatrixXd g(m_ref, n);
  const double scale = -1.0 / (2.0 * kd.sigma * kd.sigma);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index r = 0; r < m_ref; ++r)
      g(r, j) = std::exp(scale *
                         (kd.reference_points.col(r) - points.col(j)).squaredNorm());
  return g;
}

double kernelized_distance(const Eigen::VectorXd& k_x, const Eigen::VectorXd& k_p,
                           const Eigen::MatrixXd& factor_b) {
  if (k_x.size() != k_p.size() || factor_b.rows() != k_x.size())
    throw std::invalid_argument("kernelized_distance: dimension mismatch");
  return (factor_b.transpose() * (k_x - k_p)).squaredNorm();
}

}  // namespace lmdl
