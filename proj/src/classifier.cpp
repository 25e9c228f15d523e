#include "lmdl/classifier.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "lmdl/rng.hpp"

namespace lmdl {

int nearest_prototype(const Eigen::VectorXd& x, const Model& model) {
  const Eigen::VectorXd h = model.to_model_space(x);
  if (h.size() != model.prototypes.dim())
    throw std::invalid_argument("input dimensionality does not match the model");
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int s = 0; s < model.prototypes.size(); ++s) {
    const double d2 = squared_distance(h, s, model.prototypes);
    if (d2 < best_d) {
      best_d = d2;
      best = s;
    }
  }
  return best;
}

int predict(const Eigen::VectorXd& x, const Model& model) {
  return model.prototypes.labels[nearest_prototype(x, model)];
}

double loo_accuracy(const Dataset& ds, const Model& model) {
  int correct = 0;
  for (int i = 0; i < ds.size(); ++i)
    if (predict(ds.features.col(i), model) == ds.labels[i]) ++correct;
  return static_cast<double>(correct) / ds.size();
}

EvalReport cross_validate(const Dataset& ds, const TrainConfig& cfg, int folds,
                          int repeats, std::uint64_t seed, int threads) {
  ds.validate();
  const auto plans = make_folds(ds, folds, repeats, seed);

  const int jobs = folds * repeats;
  std::vector<double> errors(jobs, 0.0);
  std::vector<Eigen::MatrixXi> confusions(
      jobs, Eigen::MatrixXi::Zero(ds.class_count, ds.class_count));

  auto run_job = [&](int job) {
    const int r = job / folds;
    const int f = job % folds;
    const FoldPlan& plan = plans[r];
    TrainConfig job_cfg = cfg;
    job_cfg.seed = derive_seed(seed, 0x5000 + static_cast<std::uint64_t>(job));
    const Model model = train(ds.subset(plan.train_indices(f)), job_cfg);
    int wrong = 0;
    const auto test = plan.test_indices(f);
    for (int i : test) {
      const int pred = predict(ds.features.col(i), model);
      confusions[job](ds.labels[i] - 1, pred - 1) += 1;
      if (pred != ds.labels[i]) ++wrong;
    }
    errors[job] = static_cast<double>(wrong) / static_cast<double>(test.size());
  };

  int workers = threads > 0 ? threads
                            : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, jobs));
  if (workers == 1) {
    for (int job = 0; job < jobs; ++job) run_job(job);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int job = next.fetch_add(1); job < jobs; job = next.fetch_add(1)) {
          try {
            run_job(job);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  EvalReport report;
  report.per_fold_errors = std::move(errors);
  report.fold_count = folds;
  report.repeats = repeats;
  report.seed = seed;
  report.confusion = Eigen::MatrixXi::Zero(ds.class_count, ds.class_count);
  for (const auto& c : confusions) report.confusion += c;

  double sum = 0.0;
  for (double e : report.per_fold_errors) sum += e;
  report.mean_error = sum / jobs;
  double sq = 0.0;
  for (double e : report.per_fold_errors) sq += (e - report.mean_error) * (e - report.mean_error);
  report.std_error = std::sqrt(sq / jobs);
  return report;
}

}  // namespace lmdl
