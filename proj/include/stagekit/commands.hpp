#pragma once

#include <json.hpp>

namespace stagekit::commands {

/// Batch entry points behind the C API and the CLI. Each takes a JSON
/// configuration object and returns the report object; commands that emit
/// files (ensemble, feature dumps) write them as a side effect.
nlohmann::ordered_json run_ensemble(const nlohmann::json& config);
nlohmann::ordered_json run_evaluate(const nlohmann::json& config);
nlohmann::ordered_json run_markers(const nlohmann::json& config);
nlohmann::ordered_json run_disagree(const nlohmann::json& config);
nlohmann::ordered_json run_stats(const nlohmann::json& config);
nlohmann::ordered_json run_gamlss_predict(const nlohmann::json& config);

/// Dispatch by subcommand name ("ensemble", "evaluate", "markers",
/// "disagree", "stats", "gamlss-predict").
nlohmann::ordered_json run_command(const std::string& command, const nlohmann::json& config);

}  // namespace stagekit::commands
