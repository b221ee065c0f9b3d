#include "bnshap/selection.hpp"

#include "bnshap/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bnshap {

const char* toString(Strategy s) {
    switch (s) {
        case Strategy::TopK: return "topk";
        case Strategy::RecursiveElimination: return "rfe";
        case Strategy::MarkovBoundaryOracle: return "mb";
    }
    return "?";
}

Strategy strategyFromString(const std::string& s) {
    if (s == "topk") return Strategy::TopK;
    if (s == "rfe") return Strategy::RecursiveElimination;
    if (s == "mb") return Strategy::MarkovBoundaryOracle;
    throwInput("unknown strategy '" + s + "' (expected topk, rfe or mb)");
}

std::vector<VariableId> rankPlayers(const std::vector<double>& phi) {
    std::vector<VariableId> order(phi.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](VariableId a, VariableId b) {
        if (std::abs(phi[a] - phi[b]) <= kRankTieTol) return false;
        return phi[a] > phi[b];
    });
    return order;
}

namespace {

SubsetMask playerMaskFromVariables(SubsetMask variables, const std::vector<VariableId>& playerVariables) {
    SubsetMask out;
    for (VariableId p = 0; p < playerVariables.size(); ++p) {
        if (variables.contains(playerVariables[p])) out = out.with(p);
    }
    return out;
}

void checkMapping(const Dag& g, const Game& game, const std::vector<VariableId>& playerVariables) {
    if (playerVariables.size() != game.numPlayers()) throwInput("player/variable mapping has the wrong size");
    for (VariableId v : playerVariables) {
        g.checkId(v);
        if (v == g.target()) throwInput("the target cannot be a player");
    }
}

}  // namespace

SelectionResult selectTopK(const Game& game, std::size_t k) {
    const std::size_t n = game.numPlayers();
    if (k == 0 || k > n) throwInput("k must be between 1 and the number of players");
    const ShapleyReport report = exactShapley(game, {.keepSummands = false});
    const auto order = rankPlayers(report.values);

    SelectionResult r;
    r.strategy = Strategy::TopK;
    std::vector<VariableId> all(n);
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
        r.selected = r.selected.with(order[i]);
        r.trace.push_back({i, order[i], false, all, report.values});
    }
    r.performance = game.value(r.selected);
    return r;
}

SelectionResult selectRfe(const Game& game, std::size_t stopK) {
    const std::size_t n = game.numPlayers();
    if (stopK == 0 || stopK > n) throwInput("stop_k must be between 1 and the number of players");

    SelectionResult r;
    r.strategy = Strategy::RecursiveElimination;
    SubsetMask survivors = game.players();
    std::size_t step = 0;
    while (static_cast<std::size_t>(survivors.size()) > stopK) {
        const auto kept = survivors.members();
        const ShapleyReport report = exactShapley(game.restrictedTo(survivors), {.keepSummands = false});
        const auto order = rankPlayers(report.values);
        // Lowest value; among ties the smallest index, which is the first of
        // the tied block in `order`.
        std::size_t pos = order.size() - 1;
        while (pos > 0 && std::abs(report.values[order[pos - 1]] - report.values[order[pos]]) <= kRankTieTol) --pos;
        const VariableId victim = kept[order[pos]];
        r.trace.push_back({step++, victim, true, kept, report.values});
        survivors = survivors.without(victim);
    }
    r.selected = survivors;
    r.performance = game.value(survivors);
    return r;
}

SelectionResult selectMarkovBoundary(const Dag& g, const Game& game, const std::vector<VariableId>& playerVariables) {
    checkMapping(g, game, playerVariables);
    SelectionResult r;
    r.strategy = Strategy::MarkovBoundaryOracle;
    r.selected = playerMaskFromVariables(markovBoundary(g), playerVariables);
    r.performance = game.value(r.selected);
    return r;
}

ComparisonReport compareStrategies(const std::vector<SelectionResult>& results, const Game& game, const Dag& g,
                                   const std::vector<VariableId>& playerVariables) {
    checkMapping(g, game, playerVariables);
    ComparisonReport out;
    out.markovBoundary = playerMaskFromVariables(markovBoundary(g), playerVariables);
    out.oraclePerformance = game.value(out.markovBoundary);
    for (const auto& res : results) {
        if (!res.selected.isSubsetOf(game.players())) throwInput("selection references unknown players");
        StrategyComparison c;
        c.strategy = res.strategy;
        c.selected = res.selected;
        c.performance = game.value(res.selected);
        c.gap = out.oraclePerformance - c.performance;
        c.optimal = out.markovBoundary.isSubsetOf(res.selected);
        c.minimalOptimal = res.selected == out.markovBoundary;
        c.missed = out.markovBoundary - res.selected;
        c.redundant = res.selected - out.markovBoundary;
        out.strategies.push_back(c);
    }
    return out;
}

}  // namespace bnshap
