#pragma once

#include <cstdint>
#include <vector>

#include "lmdl/dataset.hpp"
#include "lmdl/trainer.hpp"

namespace lmdl {

/// Index of the prototype nearest to x under its own metric, ties toward
/// the lowest index. x is a raw input vector; the model's scaling and
/// kernel embedding are applied first.
int nearest_prototype(const Eigen::VectorXd& x, const Model& model);

/// Label of the nearest prototype.
int predict(const Eigen::VectorXd& x, const Model& model);

/// Fraction of dataset points whose predicted label matches the true one.
/// Prediction compares against prototypes, never against other points, so
/// this is the prototype-NN rule's training accuracy.
double loo_accuracy(const Dataset& ds, const Model& model);

/// Aggregated k-fold cross-validation result.
struct EvalReport {
  std::vector<double> per_fold_errors;  // repeat-major, then fold
  double mean_error = 0.0;
  double std_error = 0.0;               // population convention
  Eigen::MatrixXi confusion;            // rows true class, cols predicted
  int fold_count = 0;
  int repeats = 0;
  std::uint64_t seed = 0;
};

/// Repeated stratified cross-validation: per (repeat, fold) the model is
/// trained on the train split only (standardization and any sigma search
/// included) and scored on the held-out fold. `threads` caps concurrent
/// fold jobs; results are deterministic regardless of the cap.
EvalReport cross_validate(const Dataset& ds, const TrainConfig& cfg, int folds,
                          int repeats, std::uint64_t seed, int threads = 0);

}  // namespace lmdl
