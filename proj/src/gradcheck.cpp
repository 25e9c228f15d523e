#include "lmdl/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

#include "lmdl/objective.hpp"
#include "lmdl/rng.hpp"

namespace lmdl {

namespace {

double loss_at(const Eigen::VectorXd& x, int same_index, int diff_index,
               const PrototypeSet& ps, const LossConfig& cfg) {
  return sigmoid(ratio_at(x, same_index, diff_index, ps, cfg).ratio, cfg.beta);
}

double rel_error(double a, double f) {
  return std::abs(a - f) / std::max({std::abs(a), std::abs(f), 1e-6});
}

}  // namespace

GradCheckResult gradient_check(const GradCheckConfig& cfg) {
  if (cfg.dim < 1 || cfg.rank < 1 || cfg.rank > cfg.dim)
    throw std::invalid_argument("gradient_check: need 1 <= rank <= dim");
  if (cfg.prototypes < 2)
    throw std::invalid_argument("gradient_check: need at least 2 prototypes");
  if (cfg.trials < 1) throw std::invalid_argument("gradient_check: trials must be positive");

  Rng rng = make_rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> coin(1, 2);
  const LossConfig loss{cfg.beta, 1e-12};
  const double h = cfg.step;

  GradCheckResult result;
  auto record = [&](double rel, int trial, const char* block) {
    if (rel > result.max_rel_error) {
      result.max_rel_error = rel;
      result.worst_trial = trial;
      result.worst_block = block;
    }
  };

  for (int trial = 0; trial < cfg.trials; ++trial) {
    PrototypeSet ps;
    ps.positions.resize(cfg.dim, cfg.prototypes);
    for (int s = 0; s < cfg.prototypes; ++s) {
      for (int i = 0; i < cfg.dim; ++i) ps.positions(i, s) = gauss(rng);
      ps.labels.push_back(s % 2 + 1);  // both classes always present
      FactorMetric fm;
      fm.factor.resize(cfg.dim, cfg.rank);
      for (int j = 0; j < cfg.rank; ++j)
        for (int i = 0; i < cfg.dim; ++i) fm.factor(i, j) = gauss(rng);
      ps.metrics.push_back(std::move(fm));
    }
    Eigen::VectorXd x(cfg.dim);
    for (int i = 0; i < cfg.dim; ++i) x[i] = gauss(rng);
    const int label = coin(rng);

    SampleGradients analytic = sample_gradients(x, label, ps, loss);
    if (cfg.corrupt) analytic.grad_factor_same(0, 0) += 1e-3;
    const int s0 = analytic.at.same_index;
    const int d0 = analytic.at.diff_index;

    auto central = [&](double& param) {
      const double saved = param;
      param = saved + h;
      const double up = loss_at(x, s0, d0, ps, loss);
      param = saved - h;
      const double down = loss_at(x, s0, d0, ps, loss);
      param = saved;
      return (up - down) / (2.0 * h);
    };

    for (int j = 0; j < cfg.rank; ++j)
      for (int i = 0; i < cfg.dim; ++i) {
        record(rel_error(analytic.grad_factor_same(i, j),
                         central(ps.metrics[s0].factor(i, j))),
               trial, "factor_same");
        record(rel_error(analytic.grad_factor_diff(i, j),
                         central(ps.metrics[d0].factor(i, j))),
               trial, "factor_diff");
      }
    for (int i = 0; i < cfg.dim; ++i) {
      record(rel_error(analytic.grad_proto_same[i], central(ps.positions(i, s0))),
             trial, "proto_same");
      record(rel_error(analytic.grad_proto_diff[i], central(ps.positions(i, d0))),
             trial, "proto_diff");
    }
  }
  return result;
}

}  // namespace lmdl
