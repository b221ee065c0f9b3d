#pragma once

#include "bnshap/io.hpp"
#include "bnshap/model.hpp"

#include <string>

#ifndef BNSHAP_MODELS_DIR
#error "BNSHAP_MODELS_DIR must point at the bundled models"
#endif

namespace bnshap::fixtures {

inline std::string modelPath(const std::string& file) { return std::string(BNSHAP_MODELS_DIR) + "/" + file; }

inline Model sibling() { return loadModelFile(modelPath("sibling_gaussian.json")); }
inline Model commonCause() { return loadModelFile(modelPath("common_cause_discrete.json")); }
inline Model xorCollider() { return loadModelFile(modelPath("xor_collider.json")); }

inline Dag siblingGraph() {
    return Dag::fromNames({"A", "B", "C", "S", "T"},
                          {{"A", "T"}, {"B", "T"}, {"C", "T"}, {"A", "S"}, {"B", "S"}, {"C", "S"}}, "T");
}

inline Dag commonCauseGraph() {
    return Dag::fromNames({"A", "B", "C", "T"}, {{"C", "A"}, {"C", "B"}, {"A", "T"}, {"B", "T"}}, "T");
}

/// Sibling SEM plus an isolated variable D ~ N(0, 1).
inline Model siblingWithIsolated() {
    auto doc = modelToJson(sibling());
    doc["variables"].push_back("D");
    doc["noise_variance"]["D"] = 1.0;
    return parseModel(doc);
}

}  // namespace bnshap::fixtures
