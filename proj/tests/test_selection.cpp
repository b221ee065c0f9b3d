#include "bnshap/error.hpp"
#include "bnshap/selection.hpp"

#include "support/doctest.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/common_cause_oracle.hpp"

using namespace bnshap;

TEST_CASE("ranking breaks ties toward the smaller index") {
    CHECK(rankPlayers({0.1, 0.3, 0.2}) == std::vector<VariableId>{1, 2, 0});
    CHECK(rankPlayers({0.2, 0.2, 0.5, 0.2 + 1e-14}) == std::vector<VariableId>{2, 0, 1, 3});
    CHECK(rankPlayers({}).empty());
}

TEST_CASE("top-k on the sibling network") {
    const Model m = fixtures::sibling();
    const auto& g = m.game();

    const auto one = selectTopK(g, 1);
    CHECK(one.selected == SubsetMask::single(3));
    CHECK(std::abs(one.performance - 9.0 / 16) < 1e-12);
    REQUIRE(one.trace.size() == 1);
    CHECK(one.trace[0].player == 3);
    CHECK_FALSE(one.trace[0].removed);

    const auto two = selectTopK(g, 2);
    CHECK(two.selected == SubsetMask(0b1001));
    CHECK(std::abs(two.performance - 7.0 / 12) < 1e-12);

    const auto three = selectTopK(g, 3);
    CHECK(three.selected == SubsetMask(0b1011));
    CHECK(std::abs(three.performance - 5.0 / 8) < 1e-12);
    CHECK(three.trace.size() == 3);

    CHECK_THROWS_AS(selectTopK(g, 0), Error);
    CHECK_THROWS_AS(selectTopK(g, 5), Error);
}

TEST_CASE("recursive elimination on the sibling network") {
    const Model m = fixtures::sibling();
    const auto& g = m.game();

    const auto r3 = selectRfe(g, 3);
    CHECK(r3.selected == SubsetMask(0b1110));
    CHECK(std::abs(r3.performance - 5.0 / 8) < 1e-12);
    REQUIRE(r3.trace.size() == 1);
    CHECK(r3.trace[0].player == 0);
    CHECK(r3.trace[0].removed);
    CHECK(r3.trace[0].survivors == std::vector<VariableId>{0, 1, 2, 3});

    const auto r1 = selectRfe(g, 1);
    CHECK(r1.selected == SubsetMask::single(3));
    CHECK(std::abs(r1.performance - 9.0 / 16) < 1e-12);
    REQUIRE(r1.trace.size() == 3);
    // Shapley values are recomputed on each restricted game.
    CHECK(r1.trace[1].survivors == std::vector<VariableId>{1, 2, 3});
    CHECK(std::abs(r1.trace[1].phi[2] - 49.0 / 144) < 1e-12);
    CHECK(std::abs(r1.trace[1].phi[0] - 41.0 / 288) < 1e-12);
    CHECK(r1.trace[2].survivors == std::vector<VariableId>{2, 3});
    CHECK(std::abs(r1.trace[2].phi[1] - 43.0 / 96) < 1e-12);
    CHECK(r1.trace[2].player == 2);

    const auto none = selectRfe(g, 4);
    CHECK(none.trace.empty());
    CHECK(none.selected == g.players());

    CHECK_THROWS_AS(selectRfe(g, 0), Error);
    CHECK_THROWS_AS(selectRfe(g, 5), Error);
}

TEST_CASE("strategy comparison on the sibling network") {
    const Model m = fixtures::sibling();
    const auto& game = m.game();
    const auto cmp = compareStrategies(
        {selectTopK(game, 1), selectTopK(game, 3), selectMarkovBoundary(m.graph(), game, m.playerVariables())}, game,
        m.graph(), m.playerVariables());
    CHECK(cmp.markovBoundary == SubsetMask(0b0111));
    CHECK(std::abs(cmp.oraclePerformance - 0.75) < 1e-12);
    REQUIRE(cmp.strategies.size() == 3);

    const auto& top1 = cmp.strategies[0];
    CHECK(std::abs(top1.gap - 3.0 / 16) < 1e-12);
    CHECK_FALSE(top1.optimal);
    CHECK(top1.missed == SubsetMask(0b0111));
    CHECK(top1.redundant == SubsetMask(0b1000));

    const auto& top3 = cmp.strategies[1];
    CHECK(std::abs(top3.gap - 1.0 / 8) < 1e-12);
    CHECK(top3.missed == SubsetMask::single(2));

    const auto& oracle = cmp.strategies[2];
    CHECK(oracle.strategy == Strategy::MarkovBoundaryOracle);
    CHECK(oracle.gap == 0.0);
    CHECK(oracle.optimal);
    CHECK(oracle.minimalOptimal);
}

TEST_CASE("common-cause network") {
    const Model m = fixtures::commonCause();
    const auto& game = m.game();

    // Independent ranking from the brute-force accuracy oracle.
    const oracle::CommonCauseJoint brute;
    const auto phi = oracle::shapleyByDefinition(
        3, [&](std::uint32_t s) { return brute.accuracy(s & 1U, s & 2U, s & 4U); });
    const auto order = rankPlayers(phi);

    const auto top = selectTopK(game, 2);
    CHECK(top.selected == SubsetMask::single(order[0]).with(order[1]));

    const auto rfe = selectRfe(game, 2);
    CHECK(rfe.selected == SubsetMask(0b110));
    CHECK(std::abs(rfe.performance - brute.accuracy(false, true, true)) < 1e-12);
    CHECK(std::abs(rfe.performance - 0.86) < 0.005);

    const auto mb = selectMarkovBoundary(m.graph(), game, m.playerVariables());
    CHECK(mb.selected == SubsetMask(0b011));
    CHECK(std::abs(mb.performance - 0.9) < 1e-12);

    const auto cmp = compareStrategies({rfe}, game, m.graph(), m.playerVariables());
    CHECK_FALSE(cmp.strategies[0].optimal);
    CHECK_FALSE(cmp.strategies[0].minimalOptimal);
    CHECK(cmp.strategies[0].gap > 0.0);
}

TEST_CASE("strategy names") {
    for (Strategy s : {Strategy::TopK, Strategy::RecursiveElimination, Strategy::MarkovBoundaryOracle}) {
        CHECK(strategyFromString(toString(s)) == s);
    }
    CHECK_THROWS_AS(strategyFromString("greedy"), Error);
}

TEST_CASE("oracle selection validates the mapping") {
    const Model m = fixtures::sibling();
    CHECK_THROWS_AS(selectMarkovBoundary(m.graph(), m.game(), {0, 1, 2}), Error);
    CHECK_THROWS_AS(selectMarkovBoundary(m.graph(), m.game(), {0, 1, 2, 4}), Error);
}
