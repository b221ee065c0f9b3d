#include "bnshap/shapley.hpp"

#include "bnshap/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>

namespace bnshap {

struct Game::State {
    std::vector<std::string> names;
    Evaluator evaluate;
    std::once_flag cacheOnce;
    std::unique_ptr<std::atomic<double>[]> cache;
};

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

void requirePlayers(std::size_t n, std::size_t cap, const char* what) {
    if (n > cap) {
        throwCapacity(std::string(what) + " supports at most " + std::to_string(cap) + " players, got " +
                      std::to_string(n));
    }
}

std::vector<double> valueTable(const Game& game) {
    const std::size_t n = game.numPlayers();
    std::vector<double> v(std::size_t{1} << n);
    for (std::uint32_t s = 0; s < v.size(); ++s) v[s] = game.value(SubsetMask(s));
    return v;
}

std::vector<double> weightsAsDouble(const std::vector<Weight>& w) {
    std::vector<double> out;
    out.reserve(w.size());
    for (const auto& x : w) out.push_back(boost::rational_cast<double>(x));
    return out;
}

}  // namespace

Game::Game(std::vector<std::string> playerNames, Evaluator evaluate) : state_(std::make_shared<State>()) {
    if (playerNames.empty()) throwInput("a game needs at least one player");
    requirePlayers(playerNames.size(), kEnumerationCap, "a game");
    if (!evaluate) throwInput("game evaluator is empty");
    state_->names = std::move(playerNames);
    state_->evaluate = std::move(evaluate);
}

std::size_t Game::numPlayers() const { return state_->names.size(); }

const std::vector<std::string>& Game::playerNames() const { return state_->names; }

double Game::value(SubsetMask s) const {
    State& st = *state_;
    if (!s.isSubsetOf(players())) throwInput("coalition references unknown players");
    std::call_once(st.cacheOnce, [&st] {
        const std::size_t size = std::size_t{1} << st.names.size();
        st.cache = std::make_unique<std::atomic<double>[]>(size);
        for (std::size_t i = 0; i < size; ++i) st.cache[i].store(kUnset, std::memory_order_relaxed);
    });
    std::atomic<double>& slot = st.cache[s.bits()];
    double v = slot.load(std::memory_order_acquire);
    if (std::isnan(v)) {
        v = st.evaluate(s);
        if (!std::isfinite(v)) throw Error(ErrorKind::Numerical, "characteristic function returned a non-finite value");
        slot.store(v, std::memory_order_release);
    }
    return v;
}

Game Game::restrictedTo(SubsetMask survivors) const {
    if (!survivors.isSubsetOf(players())) throwInput("survivor set references unknown players");
    const auto kept = survivors.members();
    std::vector<std::string> names;
    for (VariableId p : kept) names.push_back(playerNames()[p]);
    Game parent = *this;
    return Game(std::move(names), [parent, kept](SubsetMask local) {
        SubsetMask global;
        for (VariableId p : local.members()) global = global.with(kept[p]);
        return parent.value(global);
    });
}

Game Game::shifted() const {
    Game parent = *this;
    return Game(playerNames(), [parent](SubsetMask s) { return parent.value(s) - parent.baseline(); });
}

Game Game::scaledAboutBaseline(double c) const {
    Game parent = *this;
    return Game(playerNames(), [parent, c](SubsetMask s) {
        return c * (parent.value(s) - parent.baseline()) + parent.baseline();
    });
}

Game operator+(const Game& a, const Game& b) {
    if (a.numPlayers() != b.numPlayers()) throwInput("games must share the player set");
    return Game(a.playerNames(), [a, b](SubsetMask s) { return a.value(s) + b.value(s); });
}

double ShapleyReport::efficiencyResidual() const {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum - (grandValue - baseline);
}

Weight shapleyWeight(std::size_t n, std::size_t s) {
    if (n == 0) throwInput("shapley weight needs n >= 1");
    if (s + 1 > n) throwInput("shapley weight needs s <= n - 1");
    if (n > 60) throwCapacity("shapley weight overflows for n > 60");
    // (n-s-1)! s! / n! = 1 / (n * C(n-1, s))
    std::int64_t binom = 1;
    for (std::size_t k = 1; k <= s; ++k) {
        binom = binom * static_cast<std::int64_t>(n - 1 - s + k) / static_cast<std::int64_t>(k);
    }
    return Weight(1, static_cast<std::int64_t>(n) * binom);
}

ShapleyReport exactShapley(const Game& game, ExactOptions options) {
    const std::size_t n = game.numPlayers();
    requirePlayers(n, kEnumerationCap, "exact Shapley");

    ShapleyReport r;
    r.method = "exact";
    r.players = game.playerNames();
    for (std::size_t s = 0; s < n; ++s) r.weights.push_back(shapleyWeight(n, s));
    const std::vector<double> w = weightsAsDouble(r.weights);
    const std::vector<double> v = valueTable(game);
    r.baseline = v.front();
    r.grandValue = v.back();

    const bool keep = options.keepSummands && n <= kSummandKeepCap;
    const std::uint32_t half = std::uint32_t{1} << (n - 1);
    r.values.assign(n, 0.0);
    if (keep) r.summands.assign(n, std::vector<double>(half));
    for (VariableId i = 0; i < n; ++i) {
        const std::uint32_t bit = std::uint32_t{1} << i;
        double phi = 0.0;
        for (std::uint32_t k = 0; k < half; ++k) {
            const SubsetMask s = summandSubset(i, k);
            const double d = v[s.bits() | bit] - v[s.bits()];
            if (keep) r.summands[i][k] = d;
            phi += w[static_cast<std::size_t>(s.size())] * d;
        }
        r.values[i] = phi;
    }
    return r;
}

std::vector<std::pair<SubsetMask, double>> summandTable(const Game& game, VariableId player) {
    const std::size_t n = game.numPlayers();
    requirePlayers(n, kEnumerationCap, "summand table");
    if (player >= n) throwInput("unknown player");
    std::vector<std::pair<SubsetMask, double>> out;
    const std::uint32_t half = std::uint32_t{1} << (n - 1);
    out.reserve(half);
    for (std::uint32_t k = 0; k < half; ++k) {
        const SubsetMask s = summandSubset(player, k);
        out.emplace_back(s, game.value(s.with(player)) - game.value(s));
    }
    return out;
}

double pairwiseShapleyDiff(const Game& game, VariableId i, VariableId j) {
    const std::size_t n = game.numPlayers();
    requirePlayers(n, kEnumerationCap, "pairwise Shapley difference");
    if (i >= n || j >= n) throwInput("unknown player");
    if (i == j) throwInput("pairwise difference needs two distinct players");

    const SubsetMask rest = game.players().without(i).without(j);
    double diff = 0.0;
    std::uint32_t sub = 0;
    while (true) {
        const SubsetMask s(sub);
        const std::size_t size = static_cast<std::size_t>(s.size());
        // w1 + w2 = (n-s-1)! s!/n! + (n-s-2)! (s+1)!/n!
        const Weight w = shapleyWeight(n, size) + shapleyWeight(n, size + 1);
        diff += boost::rational_cast<double>(w) * (game.value(s.with(i)) - game.value(s.with(j)));
        if (sub == rest.bits()) break;
        sub = (sub - rest.bits()) & rest.bits();
    }
    return diff;
}

ShapleyReport permutationOracleShapley(const Game& game) {
    const std::size_t n = game.numPlayers();
    requirePlayers(n, kPermutationOracleCap, "the permutation oracle");

    ShapleyReport r;
    r.method = "permutation_oracle";
    r.players = game.playerNames();
    r.baseline = game.baseline();
    r.grandValue = game.grandValue();
    for (std::size_t s = 0; s < n; ++s) r.weights.push_back(shapleyWeight(n, s));

    std::vector<double> total(n, 0.0);
    std::vector<VariableId> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::uint64_t count = 0;
    do {
        SubsetMask prefix;
        double prev = game.value(prefix);
        for (VariableId p : order) {
            prefix = prefix.with(p);
            const double cur = game.value(prefix);
            total[p] += cur - prev;
            prev = cur;
        }
        ++count;
    } while (std::next_permutation(order.begin(), order.end()));

    r.values.resize(n);
    for (std::size_t p = 0; p < n; ++p) r.values[p] = total[p] / static_cast<double>(count);
    r.samples = count;
    return r;
}

namespace {

struct Welford {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }
    double sampleVariance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
};

// Adds every player's marginal contribution along `order` to `acc`.
void walkPermutation(const Game& game, const std::vector<VariableId>& order, std::vector<Welford>& acc) {
    SubsetMask prefix;
    double prev = game.baseline();
    for (VariableId p : order) {
        prefix = prefix.with(p);
        const double cur = game.value(prefix);
        acc[p].add(cur - prev);
        prev = cur;
    }
}

// One stratum: the strata members occupy `positions`; everyone else fills the
// remaining slots. Returns per-player accumulators; `exact` is set when all
// k!(n-k)! orderings were enumerated.
std::vector<Welford> runStratum(const Game& game, std::uint32_t positions, const std::vector<VariableId>& inside,
                                const std::vector<VariableId>& outside, std::uint64_t budget, std::mt19937_64& rng) {
    const std::size_t n = game.numPlayers();
    std::vector<Welford> acc(n);
    std::vector<VariableId> order(n);
    auto assemble = [&](const std::vector<VariableId>& in, const std::vector<VariableId>& out) {
        std::size_t a = 0;
        std::size_t b = 0;
        for (std::size_t pos = 0; pos < n; ++pos) {
            order[pos] = ((positions >> pos) & 1U) ? in[a++] : out[b++];
        }
    };

    std::vector<VariableId> in = inside;
    std::vector<VariableId> out = outside;
    for (std::uint64_t s = 0; s < budget; ++s) {
        std::shuffle(in.begin(), in.end(), rng);
        std::shuffle(out.begin(), out.end(), rng);
        assemble(in, out);
        walkPermutation(game, order, acc);
    }
    return acc;
}

}  // namespace

ShapleyReport monteCarloShapley(const Game& game, const MonteCarloOptions& options) {
    const std::size_t n = game.numPlayers();
    if (options.samples == 0) throwInput("Monte Carlo needs at least one sample");

    ShapleyReport r;
    r.players = game.playerNames();
    r.baseline = game.baseline();
    r.grandValue = game.grandValue();
    r.samples = options.samples;
    for (std::size_t s = 0; s < n; ++s) r.weights.push_back(shapleyWeight(n, s));

    std::vector<VariableId> inside;
    std::vector<VariableId> outside;
    if (options.strata) {
        if (!options.strata->isSubsetOf(game.players())) throwInput("strata reference unknown players");
        for (VariableId p = 0; p < n; ++p) (options.strata->contains(p) ? inside : outside).push_back(p);
    }

    // Position patterns: every n-bit mask with |inside| bits set.
    std::vector<std::uint32_t> patterns;
    if (!inside.empty() && !outside.empty()) {
        for (std::uint32_t m = 0; m < (std::uint32_t{1} << n); ++m) {
            if (static_cast<std::size_t>(std::popcount(m)) == inside.size()) patterns.push_back(m);
        }
    }
    if (patterns.size() < 2 || options.samples < 2 * patterns.size()) {
        patterns.clear();
        inside.clear();
        outside.resize(n);
        std::iota(outside.begin(), outside.end(), 0);
        patterns.push_back(0);
        r.method = "monte_carlo";
    } else {
        r.method = "monte_carlo_stratified";
    }

    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32)};
    std::mt19937_64 rng(seq);

    const std::uint64_t strataCount = patterns.size();
    const double weight = 1.0 / static_cast<double>(strataCount);
    std::vector<double> estimate(n, 0.0);
    std::vector<double> variance(n, 0.0);
    for (std::uint64_t h = 0; h < strataCount; ++h) {
        const std::uint64_t budget = options.samples / strataCount + (h < options.samples % strataCount ? 1 : 0);
        const auto acc = runStratum(game, patterns[h], inside, outside, budget, rng);
        for (std::size_t p = 0; p < n; ++p) {
            estimate[p] += weight * acc[p].mean;
            variance[p] += weight * weight * acc[p].sampleVariance() / static_cast<double>(acc[p].count);
        }
    }
    r.values = std::move(estimate);
    r.standardErrors.resize(n);
    for (std::size_t p = 0; p < n; ++p) r.standardErrors[p] = std::sqrt(variance[p]);
    return r;
}

AxiomFindings verifyAxioms(const Game& game, const ShapleyReport& report, double tol, const Game* additivityPartner) {
    const std::size_t n = game.numPlayers();
    requirePlayers(n, kEnumerationCap, "axiom verification");
    if (report.values.size() != n) throwInput("report does not match the game's player count");

    AxiomFindings f;
    double sum = 0.0;
    for (double v : report.values) sum += v;
    f.efficiencyResidual = sum - (game.grandValue() - game.baseline());
    f.efficiency = std::abs(f.efficiencyResidual) <= tol;

    const SubsetMask all = game.players();
    auto forAllSubsets = [](SubsetMask rest, auto&& fn) {
        std::uint32_t sub = 0;
        while (true) {
            if (!fn(SubsetMask(sub))) return false;
            if (sub == rest.bits()) return true;
            sub = (sub - rest.bits()) & rest.bits();
        }
    };

    for (VariableId i = 0; i < n; ++i) {
        for (VariableId j = i + 1; j < n; ++j) {
            const bool symmetric = forAllSubsets(all.without(i).without(j), [&](SubsetMask s) {
                return std::abs(game.value(s.with(i)) - game.value(s.with(j))) <= tol;
            });
            if (symmetric && std::abs(report.values[i] - report.values[j]) > tol) {
                f.symmetryViolations.emplace_back(i, j);
            }
        }
        const bool dummy = forAllSubsets(all.without(i), [&](SubsetMask s) {
            return std::abs(game.value(s.with(i)) - game.value(s)) <= tol;
        });
        if (dummy && std::abs(report.values[i]) > tol) f.dummyViolations.push_back(i);
    }

    if (additivityPartner != nullptr) {
        if (additivityPartner->numPlayers() != n) throwInput("additivity partner must share the player set");
        const ShapleyReport partner = exactShapley(*additivityPartner, {.keepSummands = false});
        const ShapleyReport combined = exactShapley(game + *additivityPartner, {.keepSummands = false});
        double worst = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            worst = std::max(worst, std::abs(combined.values[p] - (report.values[p] + partner.values[p])));
        }
        f.additivityMaxError = worst;
        f.additivity = worst <= tol;
    }
    return f;
}

const char* toString(StructuralRelation r) {
    switch (r) {
        case StructuralRelation::Parent: return "parent";
        case StructuralRelation::Child: return "child";
        case StructuralRelation::Spouse: return "spouse";
        case StructuralRelation::Connected: return "connected";
        case StructuralRelation::Disconnected: return "disconnected";
    }
    return "?";
}

std::size_t SummandStructure::mismatches() const {
    return static_cast<std::size_t>(
        std::count_if(variables.begin(), variables.end(), [](const SummandFinding& f) { return !f.matchesGraph; }));
}

SummandStructure checkSummandStructure(const ShapleyReport& report, const Dag& g, double tol) {
    const std::size_t n = report.numPlayers();
    if (n + 1 != g.size()) throwInput("report players do not correspond to the graph's non-target variables");
    if (report.summands.size() != n) throwInput("report does not carry a summand table");

    const VariableId t = g.target();
    std::vector<VariableId> vars;
    for (VariableId v = 0; v < g.size(); ++v) {
        if (v != t) vars.push_back(v);
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (report.players[p] != g.name(vars[p])) {
            throwInput("player '" + report.players[p] + "' does not match graph variable '" + g.name(vars[p]) + "'");
        }
    }

    const SubsetMask mb = markovBoundary(g);
    const SubsetMask component = connectedComponent(g, t);
    SummandStructure out;
    for (std::size_t p = 0; p < n; ++p) {
        SummandFinding f;
        f.variable = vars[p];
        f.name = g.name(vars[p]);
        if (g.parents(t).contains(f.variable)) {
            f.relation = StructuralRelation::Parent;
        } else if (g.children(t).contains(f.variable)) {
            f.relation = StructuralRelation::Child;
        } else if (mb.contains(f.variable)) {
            f.relation = StructuralRelation::Spouse;
        } else if (component.contains(f.variable)) {
            f.relation = StructuralRelation::Connected;
        } else {
            f.relation = StructuralRelation::Disconnected;
        }

        const auto& sums = report.summands[p];
        f.allPositive = true;
        f.allZero = true;
        int witnessSize = std::numeric_limits<int>::max();
        for (std::uint32_t k = 0; k < sums.size(); ++k) {
            const double d = sums[k];
            if (!(d > tol)) f.allPositive = false;
            if (d < -tol) f.hasNegative = true;
            if (std::abs(d) <= tol) {
                f.someZero = true;
                // Translate the player coalition to graph variables.
                SubsetMask coalition;
                for (VariableId q : summandSubset(static_cast<VariableId>(p), k).members()) coalition = coalition.with(vars[q]);
                if (coalition.size() < witnessSize) {
                    witnessSize = coalition.size();
                    f.zeroWitness = coalition;
                }
            } else {
                f.allZero = false;
            }
        }

        switch (f.relation) {
            case StructuralRelation::Parent:
            case StructuralRelation::Child: f.matchesGraph = f.allPositive; break;
            case StructuralRelation::Spouse:
            case StructuralRelation::Connected: f.matchesGraph = f.someZero && !f.allZero; break;
            case StructuralRelation::Disconnected: f.matchesGraph = f.allZero; break;
        }
        out.variables.push_back(std::move(f));
    }
    return out;
}

}  // namespace bnshap
