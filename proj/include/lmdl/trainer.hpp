#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lmdl/dataset.hpp"
#include "lmdl/kernel.hpp"
#include "lmdl/metric.hpp"
#include "lmdl/objective.hpp"

namespace lmdl {

/// Decaying averages of squared gradients and squared updates for one
/// parameter tensor; yields a per-entry step with no global learning rate.
struct AdadeltaState {
  Eigen::ArrayXXd avg_sq_grad;    // E[g^2]
  Eigen::ArrayXXd avg_sq_update;  // E[dx^2]
  double rho = 0.95;
  double eps = 1e-6;

  AdadeltaState() = default;
  AdadeltaState(Eigen::Index rows, Eigen::Index cols, double rho_, double eps_);
};

/// Accumulates the gradient, returns the update to add to the parameter,
/// and folds the update back into the accumulator. Mutates `state`.
Eigen::MatrixXd adadelta_step(AdadeltaState& state, const Eigen::MatrixXd& grad);

enum class TrainMode { linear, kernel };

struct TrainConfig {
  int prototypes_per_class = 5;
  int rank = 0;  // 0 selects the input dimensionality
  double beta = 10.0;
  double epsilon_converge = 1e-5;
  int max_epochs = 200;
  double rho = 0.95;
  double eps_ada = 1e-6;
  std::uint64_t seed = 0;
  TrainMode mode = TrainMode::linear;
  KernelKind kernel_kind = KernelKind::rbf;
  double sigma = 1.0;
  std::vector<double> sigma_grid;  // non-empty: grid-search sigma by internal CV
  bool standardize = true;
  double denom_floor = 1e-12;

  LossConfig loss() const { return LossConfig{beta, denom_floor}; }
};

/// The 19-value power-of-two RBF width grid 2^-15 .. 2^3.
std::vector<double> default_sigma_grid();

struct TrainingSummary {
  double initial_objective = 0.0;
  double final_objective = 0.0;
  int epochs = 0;
};

/// Trained artifact. In kernel mode the prototype set lives in kernel
/// coordinates and `kernel` stores the reference points that define them;
/// `scaling` maps raw inputs into the space the model was trained in.
struct Model {
  PrototypeSet prototypes;
  TrainMode mode = TrainMode::linear;
  double beta = 10.0;
  double denom_floor = 1e-12;
  std::optional<KernelDescriptor> kernel;
  std::optional<ScalingRecord> scaling;
  TrainingSummary summary;

  /// Maps a raw input vector into the space the prototypes live in
  /// (scaling, then kernel coordinates in kernel mode).
  Eigen::VectorXd to_model_space(const Eigen::VectorXd& x) const;
};

/// Raised when training observes a non-finite gradient or parameter.
struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Prototypes sampled per class from the data (uniform, without
/// replacement, seeded); every factor starts as the first `rank` identity
/// columns plus Gaussian noise of std 1e-3.
PrototypeSet initialize(const Dataset& ds, const TrainConfig& cfg);

/// One-sample update machinery: nearest-prototype lookup, gradients, and
/// an independent Adadelta state per factor and per prototype column,
/// created lazily on first use.
class Trainer {
 public:
  Trainer(PrototypeSet ps, const LossConfig& loss, double rho, double eps_ada);

  /// Applies one sample visit; exactly the two selected factors and two
  /// prototype columns change. Returns true if any entry moved.
  bool visit(const Eigen::VectorXd& x, int label);

  const PrototypeSet& prototypes() const { return ps_; }
  PrototypeSet take_prototypes() { return std::move(ps_); }

 private:
  PrototypeSet ps_;
  LossConfig loss_;
  double rho_;
  double eps_ada_;
  std::vector<std::optional<AdadeltaState>> factor_states_;
  std::vector<std::optional<AdadeltaState>> proto_states_;
};

/// Full training: standardize (unless disabled), initialize prototypes,
/// then run epochs of seeded-shuffle sample visits until the epoch-to-epoch
/// objective change drops to epsilon_converge or max_epochs is hit.
/// Dispatches to the kernelized path when cfg.mode == kernel.
Model train(const Dataset& ds, const TrainConfig& cfg);

/// The same procedure run in kernel coordinates: reference points are the
/// (standardized) training points, prototypes start from kernel columns of
/// training points, and factors have reference_count rows.
Model train_kernelized(const Dataset& ds, const TrainConfig& cfg);

/// Picks the RBF width from `grid` by internal stratified cross-validation
/// on `ds` alone (no outer test data involved). Lowest mean error wins,
/// ties toward the smaller width.
double select_sigma(const Dataset& ds, const TrainConfig& cfg,
                    const std::vector<double>& grid, int folds, std::uint64_t seed);

}  // namespace lmdl
