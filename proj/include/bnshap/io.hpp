#pragma once

#include "bnshap/model.hpp"
#include "bnshap/prevalence.hpp"
#include "bnshap/selection.hpp"
#include "bnshap/shapley.hpp"

#include "json.hpp"

#include <string>

namespace bnshap {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

// Model files -------------------------------------------------------------

/// Parses a model document. Schema violations throw Input errors naming the
/// offending field path (e.g. "cpts[1].table[0]").
Model parseModel(const nlohmann::json& doc);
/// Like parseModel, but reports JSON syntax errors with line and column.
Model parseModelText(const std::string& text);
Model loadModelFile(const std::string& path);
nlohmann::json modelToJson(const Model& model);

SimConfig parseSimConfig(const nlohmann::json& doc);
SimConfig parseSimConfigText(const std::string& text);
SimConfig loadSimConfigFile(const std::string& path);

/// Reads a whole file; throws Input if it cannot be opened.
std::string readTextFile(const std::string& path);

// Reports -----------------------------------------------------------------

nlohmann::json maskToJson(SubsetMask mask, const std::vector<std::string>& names);

nlohmann::json toJson(const ShapleyReport& r);
ShapleyReport shapleyReportFromJson(const nlohmann::json& j);

nlohmann::json toJson(const AxiomFindings& f, const std::vector<std::string>& players);
nlohmann::json toJson(const SummandStructure& s, const Dag& g);
nlohmann::json toJson(const SelectionResult& r, const std::vector<std::string>& players);
nlohmann::json toJson(const ComparisonReport& r, const std::vector<std::string>& players);

nlohmann::json toJson(const PrevalenceReport& r);
PrevalenceReport prevalenceReportFromJson(const nlohmann::json& j);

/// {"schema_version", "tool", "version", "command", "seed", "generated_at", "payload"}.
/// Only "generated_at" varies between identical invocations.
nlohmann::json envelope(const std::string& command, const nlohmann::json& payload,
                        std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace bnshap
