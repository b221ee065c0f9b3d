#pragma once

#include "bnshap/io.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bnshap {

inline constexpr double kDefaultTol = 1e-9;

struct ShapleyCommand {
    /// Monte Carlo sample count; exact enumeration when unset.
    std::optional<std::uint64_t> monteCarloSamples;
    std::uint64_t seed = 0;
    bool stratifyByMarkovBoundary = false;
};

/// Payload builders behind each CLI command. All are deterministic.
nlohmann::json shapleyPayload(const Model& model, const ShapleyCommand& cmd);

/// query: "mb" | "relevance" | "verify-faithfulness" | "dsep".
/// For dsep, args = {X, Y, Z...}. For verify-faithfulness an optional
/// single arg "all-pairs" widens the scope.
nlohmann::json structurePayload(const Model& model, const std::string& query, const std::vector<std::string>& args,
                                double tol);

nlohmann::json selectPayload(const Model& model, Strategy strategy, std::size_t k);

/// Summand structure, pairwise dominance for every d-separating pair and the
/// axioms, each reported as a pass/fail check.
nlohmann::json verifyTheoremsPayload(const Model& model, double tol);

nlohmann::json simulatePayload(const SimConfig& config);

}  // namespace bnshap
