#pragma once

#include "bnshap/graph.hpp"

#include <boost/rational.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bnshap {

/// Above this player count exact reports omit the per-subset summand table
/// (it would hold n * 2^(n-1) doubles).
inline constexpr std::size_t kSummandKeepCap = 20;
/// Factorial enumeration limit for the permutation oracle.
inline constexpr std::size_t kPermutationOracleCap = 8;

using Weight = boost::rational<std::int64_t>;

/// Coalitional game over n players with a memoized characteristic function.
///
/// The evaluator must be deterministic. Values are cached in a dense table of
/// 2^n atomics that is allocated on first use; concurrent callers may race to
/// fill the same entry, which is harmless because they store the same value.
/// Copies share the cache.
class Game {
public:
    using Evaluator = std::function<double(SubsetMask)>;

    Game(std::vector<std::string> playerNames, Evaluator evaluate);

    std::size_t numPlayers() const;
    const std::vector<std::string>& playerNames() const;
    SubsetMask players() const { return SubsetMask::full(numPlayers()); }

    double value(SubsetMask s) const;
    double baseline() const { return value(SubsetMask{}); }
    double grandValue() const { return value(players()); }

    /// Sub-game on the surviving players (renumbered in increasing order);
    /// eliminated players are simply absent from every coalition.
    Game restrictedTo(SubsetMask survivors) const;
    /// v(S) - v(empty): the textbook game with v(empty) = 0.
    Game shifted() const;
    /// c * (v(S) - v(empty)) + v(empty).
    Game scaledAboutBaseline(double c) const;

    friend Game operator+(const Game& a, const Game& b);

private:
    struct State;
    std::shared_ptr<State> state_;
};

/// Shapley values plus the data needed to audit them.
struct ShapleyReport {
    std::string method;  // exact | permutation_oracle | monte_carlo | monte_carlo_stratified
    std::vector<std::string> players;
    std::vector<double> values;
    /// Per-player standard errors; empty for exact methods.
    std::vector<double> standardErrors;
    /// summands[i][k] = v(S u {i}) - v(S), where S is the k-th subset of
    /// N - {i} in increasing bitmask order (see summandSubset). Empty when not
    /// kept.
    std::vector<std::vector<double>> summands;
    /// weights[s] = (n-s-1)! s! / n!
    std::vector<Weight> weights;
    double baseline = 0.0;
    double grandValue = 0.0;
    std::uint64_t samples = 0;

    std::size_t numPlayers() const { return players.size(); }
    double efficiencyResidual() const;
    bool operator==(const ShapleyReport&) const = default;
};

/// The k-th subset of N - {player} in increasing bitmask order.
constexpr SubsetMask summandSubset(VariableId player, std::uint32_t k) {
    const std::uint32_t low = k & ((std::uint32_t{1} << player) - 1);
    const std::uint32_t high = (k >> player) << (player + 1);
    return SubsetMask(low | high);
}

/// (n - s - 1)! s! / n!, exactly.
Weight shapleyWeight(std::size_t n, std::size_t s);

struct ExactOptions {
    bool keepSummands = true;
};

ShapleyReport exactShapley(const Game& game, ExactOptions options = {});

/// Every marginal contribution of `player`, keyed by coalition, in
/// increasing bitmask order.
std::vector<std::pair<SubsetMask, double>> summandTable(const Game& game, VariableId player);

/// phi_i - phi_j via the pairwise cancellation identity (2^(n-2) terms).
double pairwiseShapleyDiff(const Game& game, VariableId i, VariableId j);

/// Independent oracle: average marginal contribution over all n! orderings.
ShapleyReport permutationOracleShapley(const Game& game);

struct MonteCarloOptions {
    std::uint64_t samples = 1000;
    std::uint64_t seed = 0;
    /// Stratify permutations by the positions taken by these players.
    std::optional<SubsetMask> strata;
};

/// Permutation-sampling estimate with per-player standard errors.
///
/// With strata, each of the C(n, k) position patterns of the k strata members
/// is a stratum with probability 1 / C(n, k); samples are allocated
/// proportionally and the stratum means are combined with those weights, so
/// the estimator stays unbiased. Fewer than two samples per stratum falls back
/// to plain sampling. This stratification scheme is our own design.
ShapleyReport monteCarloShapley(const Game& game, const MonteCarloOptions& options);

struct AxiomFindings {
    double efficiencyResidual = 0.0;
    bool efficiency = true;
    std::vector<std::pair<VariableId, VariableId>> symmetryViolations;
    std::vector<VariableId> dummyViolations;
    std::optional<bool> additivity;  // set when a partner game was supplied
    double additivityMaxError = 0.0;

    bool allHold() const {
        return efficiency && symmetryViolations.empty() && dummyViolations.empty() && additivity.value_or(true);
    }
};

/// Checks generalized efficiency, symmetry, dummy and (with a partner game on
/// the same players) additivity of `report` against `game`.
AxiomFindings verifyAxioms(const Game& game, const ShapleyReport& report, double tol,
                           const Game* additivityPartner = nullptr);

enum class StructuralRelation { Parent, Child, Spouse, Connected, Disconnected };

const char* toString(StructuralRelation r);

struct SummandFinding {
    VariableId variable = 0;
    std::string name;
    StructuralRelation relation = StructuralRelation::Disconnected;
    bool allPositive = false;
    bool someZero = false;
    bool allZero = false;
    bool hasNegative = false;
    /// Smallest coalition (graph-variable mask) with a zero summand, if any.
    std::optional<SubsetMask> zeroWitness;
    bool matchesGraph = true;
};

struct SummandStructure {
    std::vector<SummandFinding> variables;
    std::size_t mismatches() const;
};

/// Compares the sign pattern of every player's summands with what the graph
/// predicts: all positive exactly for PC(T), at least one zero for every other
/// connected variable (spouses included) and all zero for variables with no
/// path to T. Players are the non-target variables of `g` in index order.
SummandStructure checkSummandStructure(const ShapleyReport& report, const Dag& g, double tol);

}  // namespace bnshap
