#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "helpers.hpp"
#include "lmdl/model_io.hpp"

using namespace lmdl;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void check_bit_identical(const Model& a, const Model& b) {
  CHECK(a.prototypes.positions == b.prototypes.positions);
  CHECK(a.prototypes.labels == b.prototypes.labels);
  REQUIRE(a.prototypes.metrics.size() == b.prototypes.metrics.size());
  for (std::size_t s = 0; s < a.prototypes.metrics.size(); ++s)
    CHECK(a.prototypes.metrics[s].factor == b.prototypes.metrics[s].factor);
  CHECK(a.beta == b.beta);
  CHECK(a.denom_floor == b.denom_floor);
  CHECK((a.mode == b.mode));
  CHECK(a.summary.initial_objective == b.summary.initial_objective);
  CHECK(a.summary.final_objective == b.summary.final_objective);
  CHECK(a.summary.epochs == b.summary.epochs);
  CHECK(a.kernel.has_value() == b.kernel.has_value());
  if (a.kernel) {
    CHECK((a.kernel->kind == b.kernel->kind));
    CHECK(a.kernel->sigma == b.kernel->sigma);
    CHECK(a.kernel->reference_points == b.kernel->reference_points);
  }
  CHECK(a.scaling.has_value() == b.scaling.has_value());
  if (a.scaling) {
    CHECK(a.scaling->mean == b.scaling->mean);
    CHECK(a.scaling->std == b.scaling->std);
  }
}

}  // namespace

TEST_CASE("linear models round-trip bit-exactly through JSON") {
  Dataset ds = generate_synthetic(SyntheticKind::two_gaussians, 50, 1.0, 2);
  TrainConfig cfg;
  cfg.prototypes_per_class = 2;
  cfg.max_epochs = 25;
  Model model = train(ds, cfg);

  const std::string path = temp_path("lmdl_roundtrip_linear.json");
  save_model(model, path);
  Model loaded = load_model(path);
  std::remove(path.c_str());
  check_bit_identical(model, loaded);

  // predictions are bit-identical too
  for (int i = 0; i < ds.size(); ++i)
    CHECK(predict(ds.features.col(i), model) == predict(ds.features.col(i), loaded));
}

TEST_CASE("kernel models round-trip with descriptor and references intact") {
  Dataset ds = generate_synthetic(SyntheticKind::concentric_circles, 40, 0.1, 4);
  TrainConfig cfg;
  cfg.mode = TrainMode::kernel;
  cfg.prototypes_per_class = 2;
  cfg.rank = 2;
  cfg.max_epochs = 15;
  Model model = train(ds, cfg);

  const std::string path = temp_path("lmdl_roundtrip_kernel.json");
  save_model(model, path);
  Model loaded = load_model(path);
  std::remove(path.c_str());
  check_bit_identical(model, loaded);
}

TEST_CASE("unknown format versions are rejected on load") {
  Dataset ds = generate_synthetic(SyntheticKind::two_gaussians, 20, 1.0, 2);
  TrainConfig cfg;
  cfg.prototypes_per_class = 1;
  cfg.max_epochs = 2;
  nlohmann::json j = model_to_json(train(ds, cfg));
  j["format_version"] = 999;
  CHECK_THROWS(model_from_json(j));
}

TEST_CASE("serialized model JSON has a stable key set") {
  Dataset ds = generate_synthetic(SyntheticKind::two_gaussians, 20, 1.0, 2);
  TrainConfig cfg;
  cfg.prototypes_per_class = 1;
  cfg.max_epochs = 2;
  nlohmann::json j = model_to_json(train(ds, cfg));
  for (const char* key : {"format_version", "mode", "beta", "rank", "prototype_labels",
                          "prototype_positions", "factors", "kernel", "scaling",
                          "summary"})
    CHECK(j.contains(key));
}

TEST_CASE("evaluation reports serialize deterministically") {
  Dataset ds = generate_synthetic(SyntheticKind::two_gaussians, 60, 1.0, 11);
  TrainConfig cfg;
  cfg.prototypes_per_class = 2;
  cfg.max_epochs = 10;
  EvalReport a = cross_validate(ds, cfg, 5, 2, 99);
  EvalReport b = cross_validate(ds, cfg, 5, 2, 99);
  nlohmann::json echo{{"beta", cfg.beta}};
  CHECK(report_to_json(a, echo).dump() == report_to_json(b, echo).dump());
}
