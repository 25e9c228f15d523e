#include "lmdl/model_io.hpp"

#include <fstream>
#include <stdexcept>

namespace lmdl {

using nlohmann::json;

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw std::runtime_error("matrix payload does not match its shape header");
  Eigen::MatrixXd m(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index jj = 0; jj < cols; ++jj) m(i, jj) = data[k++].get<double>();
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

}  // namespace

json model_to_json(const Model& model) {
  json j;
  j["format_version"] = kModelFormatVersion;
  j["mode"] = model.mode == TrainMode::kernel ? "kernel" : "linear";
  j["beta"] = model.beta;
  j["denom_floor"] = model.denom_floor;
  j["rank"] = model.prototypes.rank();
  j["prototype_labels"] = model.prototypes.labels;
  j["prototype_positions"] = matrix_to_json(model.prototypes.positions);
  json factors = json::array();
  for (const auto& fm : model.prototypes.metrics) factors.push_back(matrix_to_json(fm.factor));
  j["factors"] = std::move(factors);
  if (model.kernel) {
    j["kernel"] = json{{"kind", to_string(model.kernel->kind)},
                       {"sigma", model.kernel->sigma},
                       {"reference_points", matrix_to_json(model.kernel->reference_points)}};
  } else {
    j["kernel"] = nullptr;
  }
  if (model.scaling) {
    j["scaling"] = json{{"mean", vector_to_json(model.scaling->mean)},
                        {"std", vector_to_json(model.scaling->std)}};
  } else {
    j["scaling"] = nullptr;
  }
  j["summary"] = json{{"initial_objective", model.summary.initial_objective},
                      {"final_objective", model.summary.final_objective},
                      {"epochs", model.summary.epochs}};
  return j;
}

Model model_from_json(const json& j) {
  const int version = j.at("format_version").get<int>();
  if (version != kModelFormatVersion)
    throw std::runtime_error("unsupported model format version " +
                             std::to_string(version));
  Model model;
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "linear")
    model.mode = TrainMode::linear;
  else if (mode == "kernel")
    model.mode = TrainMode::kernel;
  else
    throw std::runtime_error("unknown model mode '" + mode + "'");
  model.beta = j.at("beta").get<double>();
  model.denom_floor = j.at("denom_floor").get<double>();
  model.prototypes.labels = j.at("prototype_labels").get<std::vector<int>>();
  model.prototypes.positions = matrix_from_json(j.at("prototype_positions"));
  for (const auto& f : j.at("factors"))
    model.prototypes.metrics.push_back(FactorMetric{matrix_from_json(f)});
  if (model.prototypes.metrics.size() != model.prototypes.labels.size() ||
      static_cast<int>(model.prototypes.labels.size()) != model.prototypes.size())
    throw std::runtime_error("prototype payload is inconsistent");
  if (!j.at("kernel").is_null()) {
    KernelDescriptor kd;
    kd.kind = parse_kernel_kind(j.at("kernel").at("kind").get<std::string>());
    kd.sigma = j.at("kernel").at("sigma").get<double>();
    kd.reference_points = matrix_from_json(j.at("kernel").at("reference_points"));
    model.kernel = std::move(kd);
  }
  if (!j.at("scaling").is_null()) {
    ScalingRecord rec;
    rec.mean = vector_from_json(j.at("scaling").at("mean"));
    rec.std = vector_from_json(j.at("scaling").at("std"));
    model.scaling = std::move(rec);
  }
  model.summary.initial_objective = j.at("summary").at("initial_objective").get<double>();
  model.summary.final_objective = j.at("summary").at("final_objective").get<double>();
  model.summary.epochs = j.at("summary").at("epochs").get<int>();
  if (model.mode == TrainMode::kernel && !model.kernel)
    throw std::runtime_error("kernel-mode model without kernel descriptor");
  return model;
}

void save_model(const Model& model, const std::string& path) {
  std::ofstream file(path);
  if (!file.is_open()) throw std::runtime_error("cannot write model file: " + path);
  file << model_to_json(model).dump(2) << '\n';
}

Model load_model(const std::string& path) {
  std::ifstream file(path);
  if (!file.is_open()) throw std::runtime_error("cannot open model file: " + path);
  json j;
  file >> j;
  return model_from_json(j);
}

json report_to_json(const EvalReport& report, const json& config_echo) {
  json confusion = json::array();
  for (Eigen::Index i = 0; i < report.confusion.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index jj = 0; jj < report.confusion.cols(); ++jj)
      row.push_back(report.confusion(i, jj));
    confusion.push_back(std::move(row));
  }
  return json{{"format_version", 1},
              {"per_fold_errors", report.per_fold_errors},
              {"mean_error", report.mean_error},
              {"std_error", report.std_error},
              {"confusion", std::move(confusion)},
              {"folds", report.fold_count},
              {"repeats", report.repeats},
              {"seed", report.seed},
              {"config", config_echo}};
}

}  // namespace lmdl
