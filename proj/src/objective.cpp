#include "lmdl/objective.hpp"

#include <cmath>
#include <stdexcept>

namespace lmdl {

double sigmoid(double z, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("beta must be positive");
  const double t = beta * (1.0 - z);
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

double sigmoid_derivative(double z, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("beta must be positive");
  // beta * S * (1 - S) evaluated as beta * e / (1 + e)^2 with
  // e = exp(-|beta (1 - z)|); the direct product loses the small factor to
  // cancellation once S saturates.
  const double e = std::exp(-std::abs(beta * (1.0 - z)));
  const double onep = 1.0 + e;
  return beta * e / (onep * onep);
}

RatioInfo ratio_at(const Eigen::VectorXd& x, int same_index, int diff_index,
                   const PrototypeSet& ps, const LossConfig& cfg) {
  RatioInfo info;
  info.same_index = same_index;
  info.diff_index = diff_index;
  info.d_same = squared_distance(x, same_index, ps);
  info.d_diff = squared_distance(x, diff_index, ps);
  info.ratio = info.d_same / std::max(info.d_diff, cfg.denom_floor);
  return info;
}

RatioInfo ratio(const Eigen::VectorXd& x, int label, const PrototypeSet& ps,
                const LossConfig& cfg) {
  const NearestHit same = nearest_same_class(x, label, ps);
  const NearestHit diff = nearest_diff_class(x, label, ps);
  RatioInfo info;
  info.same_index = same.index;
  info.diff_index = diff.index;
  info.d_same = same.distance;
  info.d_diff = diff.distance;
  info.ratio = info.d_same / std::max(info.d_diff, cfg.denom_floor);
  return info;
}

double objective(const Dataset& ds, const PrototypeSet& ps, const LossConfig& cfg) {
  double sum = 0.0;
  for (int i = 0; i < ds.size(); ++i)
    sum += sigmoid(ratio(ds.features.col(i), ds.labels[i], ps, cfg).ratio, cfg.beta);
  return sum / ds.size();
}

SampleGradients sample_gradients(const Eigen::VectorXd& x, int label,
                                 const PrototypeSet& ps, const LossConfig& cfg) {
  SampleGradients g;
  g.at = ratio(x, label, ps, cfg);

  const Eigen::MatrixXd& w_same = ps.metrics[g.at.same_index].factor;
  const Eigen::MatrixXd& w_diff = ps.metrics[g.at.diff_index].factor;
  const Eigen::VectorXd u = x - ps.positions.col(g.at.same_index);
  const Eigen::VectorXd v = x - ps.positions.col(g.at.diff_index);

  const double window = sigmoid_derivative(g.at.ratio, cfg.beta);
  const double inv_d = 1.0 / std::max(g.at.d_diff, cfg.denom_floor);
  const double r_over_d = g.at.ratio * inv_d;

  // u u^T W and W W^T u are assembled from the d- and p-vectors directly,
  // O(dp) per gradient instead of O(d^2).
  const Eigen::RowVectorXd ut_wsame = u.transpose() * w_same;
  const Eigen::RowVectorXd vt_wdiff = v.transpose() * w_diff;
  g.grad_factor_same = (2.0 * window * inv_d) * (u * ut_wsame);
  g.grad_factor_diff = (-2.0 * window * r_over_d) * (v * vt_wdiff);
  g.grad_proto_same = (-2.0 * window * inv_d) * (w_same * ut_wsame.transpose());
  g.grad_proto_diff = (2.0 * window * r_over_d) * (w_diff * vt_wdiff.transpose());
  return g;
}

}  // namespace lmdl
