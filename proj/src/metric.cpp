#include "lmdl/metric.hpp"

#include <limits>
#include <stdexcept>

namespace lmdl {

namespace {

void check_index(int proto_index, const PrototypeSet& ps) {
  if (proto_index < 0 || proto_index >= ps.size())
    throw std::out_of_range("prototype index out of range");
}

template <typename Pred>
NearestHit nearest_matching(const Eigen::VectorXd& x, const PrototypeSet& ps,
                            Pred&& matches, const char* what) {
  NearestHit best;
  best.distance = std::numeric_limits<double>::infinity();
  for (int s = 0; s < ps.size(); ++s) {
    if (!matches(ps.labels[s])) continue;
    double d2 = squared_distance(x, s, ps);
    if (d2 < best.distance) {
      best.index = s;
      best.distance = d2;
    }
  }
  if (best.index < 0) throw std::invalid_argument(what);
  return best;
}

}  // namespace

double squared_distance(const Eigen::VectorXd& x, int proto_index,
                        const PrototypeSet& ps) {
  check_index(proto_index, ps);
  return (ps.metrics[proto_index].factor.transpose() *
          (x - ps.positions.col(proto_index)))
      .squaredNorm();
}

NearestHit nearest_same_class(const Eigen::VectorXd& x, int label,
                              const PrototypeSet& ps) {
  return nearest_matching(
      x, ps, [label](int l) { return l == label; },
      "no prototype of the query's class");
}

NearestHit nearest_diff_class(const Eigen::VectorXd& x, int label,
                              const PrototypeSet& ps) {
  return nearest_matching(
      x, ps, [label](int l) { return l != label; },
      "no prototype outside the query's class");
}

Eigen::VectorXd project(const Eigen::VectorXd& x, int proto_index,
                        const PrototypeSet& ps) {
  check_index(proto_index, ps);
  return ps.metrics[proto_index].factor.transpose() *
         (x - ps.positions.col(proto_index));
}

}  // namespace lmdl
