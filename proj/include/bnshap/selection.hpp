#pragma once

#include "bnshap/graph.hpp"
#include "bnshap/shapley.hpp"

#include <string>
#include <vector>

namespace bnshap {

enum class Strategy { TopK, RecursiveElimination, MarkovBoundaryOracle };

const char* toString(Strategy s);
Strategy strategyFromString(const std::string& s);  // topk | rfe | mb

struct SelectionStep {
    std::size_t step = 0;
    VariableId player = 0;  // removed (RFE) or kept (top-k), in the full game's numbering
    bool removed = false;
    std::vector<VariableId> survivors;  // players the snapshot refers to
    std::vector<double> phi;            // Shapley values of `survivors` at this step
};

struct SelectionResult {
    Strategy strategy = Strategy::TopK;
    SubsetMask selected;  // player mask
    double performance = 0.0;
    std::vector<SelectionStep> trace;
};

/// Values closer than this are treated as tied; ties go to the smaller index.
inline constexpr double kRankTieTol = 1e-12;

/// Players sorted by decreasing value, ties by increasing index.
std::vector<VariableId> rankPlayers(const std::vector<double>& phi);

SelectionResult selectTopK(const Game& game, std::size_t k);

/// Recomputes exact Shapley on the surviving players after each elimination.
SelectionResult selectRfe(const Game& game, std::size_t stopK);

/// `playerVariables[p]` is the graph variable of player p.
SelectionResult selectMarkovBoundary(const Dag& g, const Game& game, const std::vector<VariableId>& playerVariables);

struct StrategyComparison {
    Strategy strategy = Strategy::TopK;
    SubsetMask selected;
    double performance = 0.0;
    double gap = 0.0;  // oracle performance minus this strategy's
    bool optimal = false;          // selected contains the Markov boundary
    bool minimalOptimal = false;   // selected equals the Markov boundary
    SubsetMask missed;             // boundary members not selected
    SubsetMask redundant;          // selected non-members
};

struct ComparisonReport {
    SubsetMask markovBoundary;  // player mask
    double oraclePerformance = 0.0;
    std::vector<StrategyComparison> strategies;
};

ComparisonReport compareStrategies(const std::vector<SelectionResult>& results, const Game& game, const Dag& g,
                                   const std::vector<VariableId>& playerVariables);

}  // namespace bnshap
