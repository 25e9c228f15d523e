#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "lmdl/classifier.hpp"
#include "lmdl/dataset.hpp"
#include "lmdl/gradcheck.hpp"
#include "lmdl/model_io.hpp"
#include "lmdl/trainer.hpp"

using nlohmann::json;

namespace {

constexpr int kExitInvalidInput = 1;
constexpr int kExitTrainingAbort = 2;
constexpr int kExitGradCheckFail = 3;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("LMDL_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring non-numeric LMDL_SEED\n";
    }
  }
  return 0;
}

struct DataFlags {
  std::string path;
  std::string label_column = "label";
  std::vector<std::string> categorical;

  void attach(CLI::App& app) {
    app.add_option("--data", path, "dataset CSV path")->required();
    app.add_option("--label", label_column, "label column name or zero-based index");
    app.add_option("--categorical", categorical,
                   "columns to expand one-hot (name or index)");
  }

  lmdl::Dataset load() const { return lmdl::load_csv(path, label_column, categorical); }
};

struct TrainFlags {
  lmdl::TrainConfig cfg;
  std::string mode = "linear";
  std::string kernel = "rbf";
  std::string sigma_grid = "none";
  bool no_standardize = false;

  void attach(CLI::App& app) {
    app.add_option("--prototypes-per-class", cfg.prototypes_per_class,
                   "prototypes sampled per class");
    app.add_option("--rank", cfg.rank, "factor rank p (0 = input dimensionality)");
    app.add_option("--beta", cfg.beta, "sigmoid slope");
    app.add_option("--epsilon-converge", cfg.epsilon_converge,
                   "objective-change convergence threshold");
    app.add_option("--max-epochs", cfg.max_epochs, "epoch cap");
    app.add_option("--rho", cfg.rho, "adadelta decay");
    app.add_option("--eps-ada", cfg.eps_ada, "adadelta epsilon");
    app.add_option("--seed", cfg.seed, "RNG seed (default: LMDL_SEED or 0)");
    app.add_option("--mode", mode, "linear or kernel")
        ->check(CLI::IsMember({"linear", "kernel"}));
    app.add_option("--kernel", kernel, "kernel kind in kernel mode")
        ->check(CLI::IsMember({"linear", "rbf"}));
    app.add_option("--sigma", cfg.sigma, "RBF width");
    app.add_option("--sigma-grid", sigma_grid,
                   "'none', 'default' (2^-15..2^3), or comma-separated widths");
    app.add_flag("--no-standardize", no_standardize, "skip feature standardization");
    app.add_option("--denom-floor", cfg.denom_floor, "distance-ratio denominator floor");
  }

  lmdl::TrainConfig resolve() const {
    lmdl::TrainConfig out = cfg;
    out.mode = mode == "kernel" ? lmdl::TrainMode::kernel : lmdl::TrainMode::linear;
    out.kernel_kind = lmdl::parse_kernel_kind(kernel);
    out.standardize = !no_standardize;
    if (sigma_grid == "default") {
      out.sigma_grid = lmdl::default_sigma_grid();
    } else if (!sigma_grid.empty() && sigma_grid != "none") {
      std::stringstream ss(sigma_grid);
      std::string tok;
      while (std::getline(ss, tok, ',')) out.sigma_grid.push_back(std::stod(tok));
    }
    return out;
  }

  json echo(const lmdl::TrainConfig& c) const {
    return json{{"prototypes_per_class", c.prototypes_per_class},
                {"rank", c.rank},
                {"beta", c.beta},
                {"epsilon_converge", c.epsilon_converge},
                {"max_epochs", c.max_epochs},
                {"rho", c.rho},
                {"eps_ada", c.eps_ada},
                {"seed", c.seed},
                {"mode", c.mode == lmdl::TrainMode::kernel ? "kernel" : "linear"},
                {"kernel", lmdl::to_string(c.kernel_kind)},
                {"sigma", c.sigma},
                {"sigma_grid", c.sigma_grid},
                {"standardize", c.standardize},
                {"denom_floor", c.denom_floor}};
  }
};

int cmd_train(const DataFlags& data, const TrainFlags& flags, const std::string& out) {
  const lmdl::Dataset ds = data.load();
  const lmdl::TrainConfig cfg = flags.resolve();
  const auto started = std::chrono::steady_clock::now();
  const lmdl::Model model = lmdl::train(ds, cfg);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  lmdl::save_model(model, out);
  json line{{"initial_objective", model.summary.initial_objective},
            {"final_objective", model.summary.final_objective},
            {"epochs", model.summary.epochs},
            {"elapsed_seconds", elapsed},
            {"model", out}};
  if (model.kernel) line["sigma"] = model.kernel->sigma;
  std::cout << line.dump() << '\n';
  return 0;
}

int cmd_evaluate(const DataFlags& data, const TrainFlags& flags,
                 const std::string& model_path, int folds, int repeats, int threads,
                 const std::string& out) {
  const lmdl::Dataset ds = data.load();
  json report_json;
  if (!model_path.empty()) {
    // Holdout evaluation of an existing model on the whole dataset.
    const lmdl::Model model = lmdl::load_model(model_path);
    lmdl::EvalReport report;
    report.confusion = Eigen::MatrixXi::Zero(ds.class_count, ds.class_count);
    int wrong = 0;
    for (int i = 0; i < ds.size(); ++i) {
      const int pred = lmdl::predict(ds.features.col(i), model);
      report.confusion(ds.labels[i] - 1, pred - 1) += 1;
      if (pred != ds.labels[i]) ++wrong;
    }
    report.per_fold_errors = {static_cast<double>(wrong) / ds.size()};
    report.mean_error = report.per_fold_errors.front();
    report.std_error = 0.0;
    report.fold_count = 1;
    report.repeats = 1;
    report_json = lmdl::report_to_json(report, json{{"model", model_path}});
  } else {
    const lmdl::TrainConfig cfg = flags.resolve();
    const lmdl::EvalReport report =
        lmdl::cross_validate(ds, cfg, folds, repeats, cfg.seed, threads);
    json echo = flags.echo(cfg);
    echo["folds"] = folds;
    echo["repeats"] = repeats;
    report_json = lmdl::report_to_json(report, echo);
  }
  if (!out.empty()) {
    std::ofstream file(out);
    if (!file.is_open()) throw std::runtime_error("cannot write report: " + out);
    file << report_json.dump(2) << '\n';
  }
  std::cout << report_json.dump() << '\n';
  return 0;
}

int cmd_project(const DataFlags& data, const std::string& model_path,
                const std::string& out) {
  const lmdl::Dataset ds = data.load();
  const lmdl::Model model = lmdl::load_model(model_path);
  std::ofstream file(out);
  if (!file.is_open()) throw std::runtime_error("cannot write projection: " + out);
  const int p = model.prototypes.rank();
  for (int j = 0; j < p; ++j) file << "proj_" << j << ',';
  file << "label,predicted,prototype\n";
  char buf[64];
  for (int i = 0; i < ds.size(); ++i) {
    const Eigen::VectorXd h = model.to_model_space(ds.features.col(i));
    const int s = lmdl::nearest_prototype(ds.features.col(i), model);
    const Eigen::VectorXd proj = lmdl::project(h, s, model.prototypes);
    for (int j = 0; j < p; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", proj[j]);
      file << buf << ',';
    }
    file << ds.labels[i] << ',' << model.prototypes.labels[s] << ',' << s << '\n';
  }
  std::cout << json{{"points", ds.size()}, {"projection", out}}.dump() << '\n';
  return 0;
}

int cmd_gradcheck(const lmdl::GradCheckConfig& cfg, double tolerance) {
  const auto started = std::chrono::steady_clock::now();
  const lmdl::GradCheckResult result = lmdl::gradient_check(cfg);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  const bool ok = result.max_rel_error <= tolerance;
  std::cout << json{{"max_rel_error", result.max_rel_error},
                    {"tolerance", tolerance},
                    {"trials", cfg.trials},
                    {"worst_trial", result.worst_trial},
                    {"worst_block", result.worst_block},
                    {"elapsed_seconds", elapsed},
                    {"pass", ok}}
                   .dump()
            << '\n';
  return ok ? 0 : kExitGradCheckFail;
}

int cmd_synth(const std::string& kind, int n, double noise, std::uint64_t seed,
              double offset, const std::string& out) {
  const lmdl::Dataset ds =
      lmdl::generate_synthetic(lmdl::parse_synthetic_kind(kind), n, noise, seed, offset);
  lmdl::save_csv(ds, out);
  std::cout << json{{"kind", kind}, {"points", ds.size()}, {"dataset", out}}.dump()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local Mahalanobis distance learning for prototype-NN classification"};
  app.require_subcommand(1);

  DataFlags train_data, eval_data, proj_data;
  TrainFlags train_flags, eval_flags;
  std::string train_out = "model.json";

  CLI::App* train = app.add_subcommand("train", "train a model and write it to disk");
  train_data.attach(*train);
  train_flags.attach(*train);
  train->add_option("--out", train_out, "model file path");

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "cross-validate training flags or score a model");
  eval_data.attach(*evaluate);
  eval_flags.attach(*evaluate);
  std::string eval_model, eval_out;
  int folds = 10, repeats = 5, threads = 0;
  evaluate->add_option("--model", eval_model, "existing model file (holdout scoring)");
  evaluate->add_option("--folds", folds, "cross-validation folds");
  evaluate->add_option("--repeats", repeats, "cross-validation repeats");
  evaluate->add_option("--threads", threads, "worker cap (0 = hardware)");
  evaluate->add_option("--out", eval_out, "report file path");

  CLI::App* project = app.add_subcommand("project", "export learned projections as CSV");
  proj_data.attach(*project);
  std::string proj_model, proj_out = "projection.csv";
  project->add_option("--model", proj_model, "model file")->required();
  project->add_option("--out", proj_out, "projection CSV path");

  CLI::App* gradcheck =
      app.add_subcommand("gradcheck", "verify analytic gradients against differences");
  lmdl::GradCheckConfig gc;
  double gc_tolerance = 1e-4;
  gradcheck->add_option("--dim", gc.dim, "input dimensionality");
  gradcheck->add_option("--rank", gc.rank, "factor rank");
  gradcheck->add_option("--prototypes", gc.prototypes, "prototype count");
  gradcheck->add_option("--trials", gc.trials, "random instances");
  gradcheck->add_option("--beta", gc.beta, "sigmoid slope");
  gradcheck->add_option("--step", gc.step, "central-difference step");
  gradcheck->add_option("--seed", gc.seed, "RNG seed");
  gradcheck->add_option("--tolerance", gc_tolerance, "max relative error allowed");
  gradcheck->add_flag("--corrupt", gc.corrupt)->group("");  // negative-control hook

  CLI::App* synth = app.add_subcommand("synth", "write a synthetic dataset CSV");
  std::string synth_kind, synth_out = "synthetic.csv";
  int synth_n = 200;
  double synth_noise = 0.08, synth_offset = 3.0;
  std::uint64_t synth_seed = default_seed();
  synth->add_option("--kind", synth_kind,
                    "two_gaussians | concentric_circles | helix")
      ->required();
  synth->add_option("--n", synth_n, "point count");
  synth->add_option("--noise", synth_noise, "noise standard deviation");
  synth->add_option("--seed", synth_seed, "RNG seed");
  synth->add_option("--offset", synth_offset, "two_gaussians center offset");
  synth->add_option("--out", synth_out, "output CSV path");

  train_flags.cfg.seed = default_seed();
  eval_flags.cfg.seed = default_seed();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(train_data, train_flags, train_out);
    if (evaluate->parsed())
      return cmd_evaluate(eval_data, eval_flags, eval_model, folds, repeats, threads,
                          eval_out);
    if (project->parsed()) return cmd_project(proj_data, proj_model, proj_out);
    if (gradcheck->parsed()) return cmd_gradcheck(gc, gc_tolerance);
    if (synth->parsed())
      return cmd_synth(synth_kind, synth_n, synth_noise, synth_seed, synth_offset,
                       synth_out);
  } catch (const lmdl::TrainingError& e) {
    std::cerr << "training aborted: " << e.what() << '\n';
    return kExitTrainingAbort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }
  return kExitInvalidInput;
}
