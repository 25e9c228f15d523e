#include "lmdl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lmdl/rng.hpp"

namespace lmdl {

namespace {

constexpr std::uint64_t kInitStream = 0x11;
constexpr std::uint64_t kEpochStream = 0x22;
constexpr std::uint64_t kSigmaStream = 0x33;

}  // namespace

AdadeltaState::AdadeltaState(Eigen::Index rows, Eigen::Index cols, double rho_,
                             double eps_)
    : avg_sq_grad(Eigen::ArrayXXd::Zero(rows, cols)),
      avg_sq_update(Eigen::ArrayXXd::Zero(rows, cols)),
      rho(rho_),
      eps(eps_) {}

Eigen::MatrixXd adadelta_step(AdadeltaState& state, const Eigen::MatrixXd& grad) {
  if (grad.rows() != state.avg_sq_grad.rows() || grad.cols() != state.avg_sq_grad.cols())
    throw std::invalid_argument("adadelta_step: gradient shape mismatch");
  if (!grad.allFinite())
    throw TrainingError("non-finite gradient passed to adadelta_step");
  const Eigen::ArrayXXd g = grad.array();
  state.avg_sq_grad = state.rho * state.avg_sq_grad + (1.0 - state.rho) * g.square();
  Eigen::ArrayXXd delta = -((state.avg_sq_update + state.eps).sqrt() /
                            (state.avg_sq_grad + state.eps).sqrt()) *
                          g;
  state.avg_sq_update =
      state.rho * state.avg_sq_update + (1.0 - state.rho) * delta.square();
  return delta.matrix();
}

std::vector<double> default_sigma_grid() {
  std::vector<double> grid;
  for (int e = -15; e <= 3; ++e) grid.push_back(std::ldexp(1.0, e));
  return grid;
}

Eigen::VectorXd Model::to_model_space(const Eigen::VectorXd& x) const {
  Eigen::VectorXd h = scaling ? scaling->apply(x) : x;
  if (mode == TrainMode::kernel) {
    if (!kernel) throw std::logic_error("kernel-mode model without kernel descriptor");
    return to_kernel_coordinates(h, *kernel).col(0);
  }
  return h;
}

PrototypeSet initialize(const Dataset& ds, const TrainConfig& cfg) {
  ds.validate();
  if (cfg.prototypes_per_class < 1)
    throw std::invalid_argument("prototypes_per_class must be positive");
  const int d = ds.dim();
  const int rank = cfg.rank == 0 ? d : cfg.rank;
  if (rank < 1 || rank > d)
    throw std::invalid_argument("rank must be in 1..d (d=" + std::to_string(d) + ")");

  std::vector<std::vector<int>> by_class(ds.class_count);
  for (int i = 0; i < ds.size(); ++i) by_class[ds.labels[i] - 1].push_back(i);
  for (int k = 0; k < ds.class_count; ++k)
    if (static_cast<int>(by_class[k].size()) < cfg.prototypes_per_class)
      throw std::invalid_argument("class " + std::to_string(k + 1) +
                                  " has fewer members than prototypes_per_class");
  const int total = cfg.prototypes_per_class * ds.class_count;
  if (total > ds.size())
    throw std::invalid_argument("prototype count cannot exceed the dataset size");

  Rng rng = make_rng(derive_seed(cfg.seed, kInitStream));
  std::normal_distribution<double> noise(0.0, 1e-3);

  PrototypeSet ps;
  ps.positions.resize(d, total);
  ps.labels.reserve(total);
  ps.metrics.reserve(total);
  int s = 0;
  for (int k = 0; k < ds.class_count; ++k) {
    auto members = by_class[k];
    std::shuffle(members.begin(), members.end(), rng);
    for (int c = 0; c < cfg.prototypes_per_class; ++c, ++s) {
      ps.positions.col(s) = ds.features.col(members[c]);
      ps.labels.push_back(k + 1);
      FactorMetric fm;
      fm.factor.resize(d, rank);
      for (int j = 0; j < rank; ++j)
        for (int i = 0; i < d; ++i)
          fm.factor(i, j) = (i == j ? 1.0 : 0.0) + noise(rng);
      ps.metrics.push_back(std::move(fm));
    }
  }
  return ps;
}

Trainer::Trainer(PrototypeSet ps, const LossConfig& loss, double rho, double eps_ada)
    : ps_(std::move(ps)),
      loss_(loss),
      rho_(rho),
      eps_ada_(eps_ada),
      factor_states_(ps_.size()),
      proto_states_(ps_.size()) {}

bool Trainer::visit(const Eigen::VectorXd& x, int label) {
  const SampleGradients g = sample_gradients(x, label, ps_, loss_);
  if (!g.grad_factor_same.allFinite() || !g.grad_factor_diff.allFinite() ||
      !g.grad_proto_same.allFinite() || !g.grad_proto_diff.allFinite())
    throw TrainingError("non-finite gradient");

  const int same = g.at.same_index;
  const int diff = g.at.diff_index;
  const int d = ps_.dim();
  const int p = ps_.rank();
  if (!factor_states_[same]) factor_states_[same].emplace(d, p, rho_, eps_ada_);
  if (!factor_states_[diff]) factor_states_[diff].emplace(d, p, rho_, eps_ada_);
  if (!proto_states_[same]) proto_states_[same].emplace(d, 1, rho_, eps_ada_);
  if (!proto_states_[diff]) proto_states_[diff].emplace(d, 1, rho_, eps_ada_);

  const Eigen::MatrixXd dw_same = adadelta_step(*factor_states_[same], g.grad_factor_same);
  const Eigen::MatrixXd dw_diff = adadelta_step(*factor_states_[diff], g.grad_factor_diff);
  const Eigen::MatrixXd dp_same = adadelta_step(*proto_states_[same], g.grad_proto_same);
  const Eigen::MatrixXd dp_diff = adadelta_step(*proto_states_[diff], g.grad_proto_diff);

  ps_.metrics[same].factor += dw_same;
  ps_.metrics[diff].factor += dw_diff;
  ps_.positions.col(same) += dp_same.col(0);
  ps_.positions.col(diff) += dp_diff.col(0);

  if (!ps_.metrics[same].factor.allFinite() || !ps_.metrics[diff].factor.allFinite() ||
      !ps_.positions.col(same).allFinite() || !ps_.positions.col(diff).allFinite())
    throw TrainingError("non-finite parameter after update");

  return dw_same.cwiseAbs().maxCoeff() > 0.0 || dw_diff.cwiseAbs().maxCoeff() > 0.0 ||
         dp_same.cwiseAbs().maxCoeff() > 0.0 || dp_diff.cwiseAbs().maxCoeff() > 0.0;
}

namespace {

std::pair<PrototypeSet, TrainingSummary> run_epochs(const Dataset& data,
                                                    const TrainConfig& cfg,
                                                    PrototypeSet ps) {
  const LossConfig loss = cfg.loss();
  const double initial = objective(data, ps, loss);
  Trainer trainer(std::move(ps), loss, cfg.rho, cfg.eps_ada);
  Rng order_rng = make_rng(derive_seed(cfg.seed, kEpochStream));
  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  double lambda = initial;
  int epochs = 0;
  while (true) {
    const double prev = lambda;
    std::shuffle(order.begin(), order.end(), order_rng);
    bool moved = false;
    for (int i : order) {
      try {
        moved = trainer.visit(data.features.col(i), data.labels[i]) || moved;
      } catch (const TrainingError& e) {
        throw TrainingError("epoch " + std::to_string(epochs + 1) + ", sample " +
                            std::to_string(i) + ": " + e.what());
      }
    }
    ++epochs;
    lambda = objective(data, trainer.prototypes(), loss);
    // |lambda' - lambda| <= epsilon ends the loop; an epoch that moved no
    // parameter at all cannot change the objective either, so it ends too.
    if (!(std::abs(lambda - prev) > cfg.epsilon_converge)) break;
    if (!moved) break;
    if (epochs >= cfg.max_epochs) break;
  }
  return {trainer.take_prototypes(), TrainingSummary{initial, lambda, epochs}};
}

TrainConfig with_resolved_rank(const TrainConfig& cfg, int dim) {
  TrainConfig out = cfg;
  out.rank = cfg.rank == 0 ? dim : cfg.rank;
  return out;
}

void validate_config(const TrainConfig& cfg) {
  if (cfg.beta <= 0.0) throw std::invalid_argument("beta must be positive");
  if (cfg.denom_floor <= 0.0 || cfg.denom_floor > 1e-9)
    throw std::invalid_argument("denom_floor must be in (0, 1e-9]");
  if (cfg.rho <= 0.0 || cfg.rho >= 1.0)
    throw std::invalid_argument("rho must be in (0, 1)");
  if (cfg.eps_ada <= 0.0) throw std::invalid_argument("eps_ada must be positive");
  if (cfg.max_epochs < 1) throw std::invalid_argument("max_epochs must be positive");
  if (cfg.epsilon_converge <= 0.0)
    throw std::invalid_argument("epsilon_converge must be positive");
}

}  // namespace

Model train(const Dataset& ds, const TrainConfig& cfg) {
  if (cfg.mode == TrainMode::kernel) return train_kernelized(ds, cfg);
  ds.validate();
  validate_config(cfg);

  Dataset work = ds;
  std::optional<ScalingRecord> scaler;
  if (cfg.standardize) {
    auto [std_ds, rec] = standardize(ds);
    work = std::move(std_ds);
    scaler = std::move(rec);
  }

  const TrainConfig eff = with_resolved_rank(cfg, work.dim());
  auto [protos, summary] = run_epochs(work, eff, initialize(work, eff));

  Model model;
  model.prototypes = std::move(protos);
  model.mode = TrainMode::linear;
  model.beta = cfg.beta;
  model.denom_floor = cfg.denom_floor;
  model.scaling = std::move(scaler);
  model.summary = summary;
  return model;
}

namespace {

// Nearest-prototype label scan used by the internal sigma search; the
// public classifier lives one module up.
int scan_label(const Model& model, const Eigen::VectorXd& x_raw) {
  const Eigen::VectorXd h = model.to_model_space(x_raw);
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int s = 0; s < model.prototypes.size(); ++s) {
    double d2 = squared_distance(h, s, model.prototypes);
    if (d2 < best_d) {
      best_d = d2;
      best = s;
    }
  }
  return model.prototypes.labels[best];
}

}  // namespace

double select_sigma(const Dataset& ds, const TrainConfig& cfg,
                    const std::vector<double>& grid, int folds, std::uint64_t seed) {
  if (grid.empty()) throw std::invalid_argument("sigma grid is empty");
  ds.validate();

  int smallest_class = ds.size();
  {
    std::vector<int> counts(ds.class_count, 0);
    for (int lab : ds.labels) ++counts[lab - 1];
    smallest_class = *std::min_element(counts.begin(), counts.end());
  }
  const int f = std::min(folds, smallest_class);
  if (f < 2)
    throw std::invalid_argument("sigma selection needs every class to have >= 2 members");

  const FoldPlan plan = make_folds(ds, f, 1, derive_seed(seed, kSigmaStream)).front();

  double best_sigma = grid.front();
  double best_error = std::numeric_limits<double>::infinity();
  for (double sigma : grid) {
    TrainConfig inner = cfg;
    inner.mode = TrainMode::kernel;
    inner.sigma = sigma;
    inner.sigma_grid.clear();
    int wrong = 0;
    for (int fold = 0; fold < f; ++fold) {
      const Dataset train_ds = ds.subset(plan.train_indices(fold));
      inner.seed = derive_seed(seed, 1000 + static_cast<std::uint64_t>(fold));
      const Model m = train_kernelized(train_ds, inner);
      for (int i : plan.test_indices(fold))
        if (scan_label(m, ds.features.col(i)) != ds.labels[i]) ++wrong;
    }
    const double err = static_cast<double>(wrong) / ds.size();
    if (err < best_error) {
      best_error = err;
      best_sigma = sigma;
    }
  }
  return best_sigma;
}

Model train_kernelized(const Dataset& ds, const TrainConfig& cfg) {
  ds.validate();
  validate_config(cfg);
  if (cfg.mode != TrainMode::kernel)
    throw std::invalid_argument("train_kernelized requires kernel mode");

  TrainConfig chosen = cfg;
  if (!cfg.sigma_grid.empty() && cfg.kernel_kind == KernelKind::rbf) {
    chosen.sigma = select_sigma(ds, cfg, cfg.sigma_grid, 10, cfg.seed);
    chosen.sigma_grid.clear();
  }

  Dataset work = ds;
  std::optional<ScalingRecord> scaler;
  if (chosen.standardize) {
    auto [std_ds, rec] = standardize(ds);
    work = std::move(std_ds);
    scaler = std::move(rec);
  }

  KernelDescriptor kd;
  kd.kind = chosen.kernel_kind;
  kd.sigma = chosen.sigma;
  kd.reference_points = work.features;

  Dataset coord_ds;
  coord_ds.features = to_kernel_coordinates(work.features, kd);
  coord_ds.labels = work.labels;
  coord_ds.class_count = work.class_count;

  // rank = 0 keeps the input dimensionality even though the coordinate
  // space has M_ref dimensions.
  TrainConfig eff = chosen;
  eff.rank = chosen.rank == 0 ? ds.dim() : chosen.rank;
  if (eff.rank > kd.reference_count())
    throw std::invalid_argument("rank exceeds the kernel reference count");

  auto [protos, summary] = run_epochs(coord_ds, eff, initialize(coord_ds, eff));

  Model model;
  model.prototypes = std::move(protos);
  model.mode = TrainMode::kernel;
  model.beta = chosen.beta;
  model.denom_floor = chosen.denom_floor;
  model.kernel = std::move(kd);
  model.scaling = std::move(scaler);
  model.summary = summary;
  return model;
}

}  // namespace lmdl
