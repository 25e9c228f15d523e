#pragma once

#include <json.hpp>
#include <string>

#include "lmdl/classifier.hpp"
#include "lmdl/trainer.hpp"

namespace lmdl {

inline constexpr int kModelFormatVersion = 1;

/// JSON forms. Matrices are stored row-major with explicit shape fields;
/// numbers round-trip bit-exactly through the serializer.
nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& j);

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

nlohmann::json report_to_json(const EvalReport& report,
                              const nlohmann::json& config_echo);

}  // namespace lmdl
