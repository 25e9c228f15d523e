#pragma once

#include <Eigen/Dense>

#include "lmdl/dataset.hpp"
#include "lmdl/metric.hpp"

namespace lmdl {

struct LossConfig {
  double beta = 10.0;         // sigmoid slope
  double denom_floor = 1e-12; // guard for the distance-ratio denominator
};

/// Sigmoid loss 1 / (1 + exp(beta * (1 - z))): strictly increasing, 0.5 at
/// z = 1, step-like as beta grows. Saturates without overflow.
double sigmoid(double z, double beta);

/// d/dz of the sigmoid above: beta * S(z) * (1 - S(z)). Non-negative.
double sigmoid_derivative(double z, double beta);

/// Nearest same/different-class assignment and the distance ratio for one
/// query point.
struct RatioInfo {
  int same_index = -1;
  int diff_index = -1;
  double d_same = 0.0;
  double d_diff = 0.0;
  double ratio = 0.0;  // d_same / max(d_diff, denom_floor)
};

/// Ratio of the nearest same-class squared distance to the nearest
/// different-class squared distance. Below 1 exactly when the prototype-NN
/// rule classifies x correctly.
RatioInfo ratio(const Eigen::VectorXd& x, int label, const PrototypeSet& ps,
                const LossConfig& cfg);

/// Same quantity with the argmin assignment frozen to the given prototype
/// indices; used by finite-difference verification, where the objective is
/// only piecewise smooth across assignment switches.
RatioInfo ratio_at(const Eigen::VectorXd& x, int same_index, int diff_index,
                   const PrototypeSet& ps, const LossConfig& cfg);

/// Mean sigmoid loss over all points of the dataset. Always in [0, 1].
double objective(const Dataset& ds, const PrototypeSet& ps, const LossConfig& cfg);

/// Per-sample gradients of the sigmoid loss with respect to the two factors
/// and two prototype positions selected by the ratio's argmins.
struct SampleGradients {
  Eigen::MatrixXd grad_factor_same;  // d x p
  Eigen::MatrixXd grad_factor_diff;  // d x p
  Eigen::VectorXd grad_proto_same;   // d
  Eigen::VectorXd grad_proto_diff;   // d
  RatioInfo at;
};

/// With g = S'(R), D = max(d_diff, floor), u = x - p_same, v = x - p_diff:
///   dL/dW_same = g *  (1/D) * 2 u u^T W_same
///   dL/dW_diff = g * (-R/D) * 2 v v^T W_diff
///   dL/dp_same = g *  (1/D) * (-2 W_same W_same^T u)
///   dL/dp_diff = g * (2R/D) *     W_diff W_diff^T v
SampleGradients sample_gradients(const Eigen::VectorXd& x, int label,
                                 const PrototypeSet& ps, const LossConfig& cfg);

}  // namespace lmdl
