// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include "bnshap/discrete_bn.hpp"
#include "bnshap/gaussian_sem.hpp"
#include "bnshap/io.hpp"
#include "bnshap/prevalence.hpp"
#include "bnshap/selection.hpp"
#include "bnshap/shapley.hpp"

#include "support/common_cause_oracle.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace bnshap;

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Collects failures and notes for one criterion.
class Criterion {
public:
    void require(bool ok, const std::string& what) {
        if (!ok && failures_++ < 5) detail_ << " [fail: " << what << "]";
    }
    void note(const std::string& s) { detail_ << " " << s; }
    bool passed() const { return failures_ == 0; }
    std::string detail() const {
        std::string d = detail_.str();
        if (failures_ > 5) d += " (+" + std::to_string(failures_ - 5) + " more)";
        return d;
    }

private:
    std::size_t failures_ = 0;
    std::ostringstream detail_;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

Game tableGame(const std::vector<double>& table, std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("P" + std::to_string(i));
    return Game(names, [table](SubsetMask s) { return table[s.bits()]; });
}

SubsetMask players(const Model& m, std::initializer_list<const char*> names) {
    SubsetMask vars;
    for (const char* n : names) vars = vars.with(m.graph().idOf(n));
    return m.toPlayerMask(vars);
}

// 1. Exact reproduction on the sibling R^2 network.
void siblingReproduction(Criterion& c) {
    const auto t0 = Clock::now();
    const Model m = fixtures::sibling();
    const Game& g = m.game();
    const std::vector<std::pair<std::vector<const char*>, double>> cases{
        {{"A"}, 1.0 / 4},           {{"B"}, 1.0 / 4},           {{"C"}, 1.0 / 4},
        {{"S"}, 9.0 / 16},          {{"A", "B"}, 1.0 / 2},      {{"B", "C"}, 1.0 / 2},
        {{"A", "C"}, 1.0 / 2},      {{"A", "S"}, 7.0 / 12},     {{"B", "S"}, 7.0 / 12},
        {{"C", "S"}, 7.0 / 12},     {{"A", "B", "S"}, 5.0 / 8}, {{"A", "C", "S"}, 5.0 / 8},
        {{"B", "C", "S"}, 5.0 / 8}, {{"A", "B", "C"}, 3.0 / 4}, {{"A", "B", "C", "S"}, 3.0 / 4},
    };
    double worstM = 0.0;
    for (const auto& [names, value] : cases) {
        SubsetMask vars;
        for (const char* n : names) vars = vars.with(m.graph().idOf(n));
        const double got = g.value(m.toPlayerMask(vars));
        worstM = std::max(worstM, std::abs(got - value));
        c.require(std::abs(got - value) <= 1e-12, "m mismatch");
    }
    const auto r = exactShapley(g);
    double worstPhi = 0.0;
    for (const char* p : {"A", "B", "C"}) {
        const double d = std::abs(r.values[players(m, {p}).members()[0]] - 95.0 / 576);
        worstPhi = std::max(worstPhi, d);
        c.require(d <= 1e-9, std::string("phi_") + p);
    }
    const double ds = std::abs(r.values[players(m, {"S"}).members()[0]] - 49.0 / 192);
    worstPhi = std::max(worstPhi, ds);
    c.require(ds <= 1e-9, "phi_S");
    const double t = secondsSince(t0);
    c.require(t < 1.0, "runtime");
    c.note("max|m err|=" + fmt("%.1e", worstM) + " max|phi err|=" + fmt("%.1e", worstPhi) + " t=" + fmt("%.3fs", t));
}

// 2. Common-cause discrete network against the brute-force oracle.
void commonCauseReproduction(Criterion& c) {
    const auto t0 = Clock::now();
    const Model m = fixtures::commonCause();
    const Game& g = m.game();
    const oracle::CommonCauseJoint brute;
    double worst = 0.0;
    for (std::uint32_t s = 0; s < 8; ++s) {
        const bool a = s & 1U, b = s & 2U, cc = s & 4U;
        SubsetMask vars;
        if (a) vars = vars.with(m.graph().idOf("A"));
        if (b) vars = vars.with(m.graph().idOf("B"));
        if (cc) vars = vars.with(m.graph().idOf("C"));
        const double d = std::abs(g.value(m.toPlayerMask(vars)) - brute.accuracy(a, b, cc));
        worst = std::max(worst, d);
        c.require(d <= 1e-9, "m vs oracle");
    }
    const auto r = exactShapley(g);
    const double pa = r.values[players(m, {"A"}).members()[0]];
    const double pb = r.values[players(m, {"B"}).members()[0]];
    const double pc = r.values[players(m, {"C"}).members()[0]];
    c.require(std::abs(pa - 0.0903) <= 1e-3, "phi_A");
    c.require(std::abs(pb - 0.0903) <= 1e-3, "phi_B");
    c.require(std::abs(pc - 0.2194) <= 1e-3, "phi_C");

    // Printed values that differ from the oracle: one typo, two roundings.
    const double mA = g.value(players(m, {"A"}));
    const double mC = g.value(players(m, {"C"}));
    const double mAC = g.value(players(m, {"A", "C"}));
    c.require(std::abs(mA - 0.525) <= 1e-9, "m({A}) = 0.525");
    c.require(std::abs(mA - 0.0525) > 0.1, "printed 0.0525 should be a typo");
    c.require(std::abs(mC - 0.8235) <= 1e-3, "m({C}) near printed 0.8235");
    c.require(std::abs(mAC - 0.8597) <= 1e-3, "m({A,C}) near printed 0.8597");
    const double t = secondsSince(t0);
    c.require(t < 1.0, "runtime");
    c.note("phi=(" + fmt("%.6f", pa) + ", " + fmt("%.6f", pb) + ", " + fmt("%.6f", pc) + ") max|m-oracle|=" +
           fmt("%.1e", worst) + "; known print issues: m({A}) printed 0.0525, oracle " + fmt("%.4f", mA) +
           "; m({C}) printed 0.8235, oracle " + fmt("%.4f", mC) + "; m({A,C}) printed 0.8597, oracle " +
           fmt("%.4f", mAC) + "; t=" + fmt("%.3fs", t));
}

// 3. Subset formula vs. the n! permutation oracle.
void oracleEquivalence(Criterion& c) {
    std::mt19937_64 rng(3);
    std::size_t games = 0;
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        for (std::size_t n = 1; n <= 7; ++n) {
            const auto table = oracle::randomValueTable(rng, n);
            const Game g = tableGame(table, n);
            const auto exact = exactShapley(g, {.keepSummands = false});
            const auto perm = permutationOracleShapley(g);
            for (std::size_t i = 0; i < n; ++i) {
                const double d = std::abs(exact.values[i] - perm.values[i]);
                worst = std::max(worst, d);
                c.require(d <= 1e-9, "player mismatch");
            }
            ++games;
        }
    }
    c.require(games >= 100, "game count");
    c.note(std::to_string(games) + " games, max|diff|=" + fmt("%.1e", worst));
}

// 4. Efficiency, symmetry, dummy and additivity.
void axiomSuite(Criterion& c) {
    std::mt19937_64 rng(4);
    std::size_t games = 0;
    for (int rep = 0; rep < 120; ++rep) {
        const std::size_t n = 3 + rep % 6;
        auto table = oracle::randomValueTable(rng, n);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        const std::size_t i = pick(rng);
        std::size_t j = pick(rng);
        while (j == i) j = pick(rng);
        std::size_t d = pick(rng);
        while (d == i || d == j) d = pick(rng);
        // Dummy: v(S + d) = v(S). Symmetry: swapping i and j leaves v unchanged.
        const std::uint32_t bi = 1U << i, bj = 1U << j, bd = 1U << d;
        for (std::uint32_t s = 0; s < table.size(); ++s) {
            if (s & bd) table[s] = table[s & ~bd];
        }
        for (std::uint32_t s = 0; s < table.size(); ++s) {
            if ((s & bi) && !(s & bj)) table[s] = table[(s & ~bi) | bj];
        }
        const Game g = tableGame(table, n);
        const Game partner = tableGame(oracle::randomValueTable(rng, n), n);
        const auto r = exactShapley(g, {.keepSummands = false});
        const auto f = verifyAxioms(g, r, 1e-9, &partner);
        c.require(f.efficiency, "efficiency");
        c.require(f.symmetryViolations.empty(), "symmetry");
        c.require(f.dummyViolations.empty(), "dummy");
        c.require(f.additivity.value_or(false), "additivity");
        // The constructed properties must actually show up in the values.
        c.require(std::abs(r.values[i] - r.values[j]) <= 1e-9, "constructed symmetric pair");
        c.require(std::abs(r.values[d]) <= 1e-9, "injected dummy");
        ++games;
    }
    c.note(std::to_string(games) + " games");
}

// 5. Summand sign pattern vs. graph ground truth.
void summandStructure(Criterion& c) {
    std::size_t mismatches = 0;
    for (const Model& m : {fixtures::sibling(), fixtures::commonCause()}) {
        const auto s = checkSummandStructure(exactShapley(m.game()), m.graph(), 1e-9);
        mismatches += s.mismatches();
    }
    c.require(mismatches == 0, "bundled networks");

    SimConfig cfg;
    cfg.parameterization = Parameterization::DiscreteDirichlet;
    cfg.score = DiscreteScore::MutualInformation;
    cfg.minCptProb = 0.05;
    cfg.edgeProbability = 0.5;
    cfg.seed = 55;
    std::size_t faithful = 0, screened = 0, spouses = 0, disconnected = 0;
    for (std::uint64_t idx = 0; faithful < 60 && idx < 5000; ++idx) {
        cfg.nVars = 3 + idx % 4;
        const Model m = generateRandomNetwork(cfg, idx);
        ++screened;
        if (!verifyFaithfulness(m.discreteNet(), 1e-4).empty()) continue;
        ++faithful;
        const auto s = checkSummandStructure(exactShapley(m.game()), m.graph(), 1e-9);
        for (const auto& f : s.variables) {
            spouses += f.relation == StructuralRelation::Spouse;
            disconnected += f.relation == StructuralRelation::Disconnected;
            c.require(f.matchesGraph, "random network " + std::to_string(idx) + " variable " + f.name);
        }
    }
    c.require(faithful >= 50, "faithful network count");
    c.note(std::to_string(faithful) + " faithful of " + std::to_string(screened) + " screened, " +
           std::to_string(spouses) + " spouses, " + std::to_string(disconnected) + " disconnected");
}

// 6. Chains V1 -> V2 -> T: the nearer cause always scores higher.
void chainSuite(Criterion& c) {
    const Dag chain = Dag::fromNames({"V1", "V2", "T"}, {{"V1", "V2"}, {"V2", "T"}}, "T");
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> coef(0.05, 2.0), noise(0.5, 2.0), prob(0.05, 0.95);
    std::bernoulli_distribution sign(0.5);
    std::size_t gaussian = 0, discrete = 0;
    double minGap = 1e300;
    auto check = [&](const Model& m) {
        const auto r = exactShapley(m.game());
        const double gap = r.values[1] - r.values[0];
        minGap = std::min(minGap, gap);
        c.require(gap > 0.0, "phi(V2) > phi(V1)");
        c.require(std::abs(pairwiseShapleyDiff(m.game(), 1, 0) - gap) <= 1e-9, "pairwise diff");
    };
    for (int i = 0; i < 50; ++i) {
        auto w = [&] { return sign(rng) ? coef(rng) : -coef(rng); };
        const LinearGaussianSem sem(chain, {{{0, 1}, w()}, {{1, 2}, w()}}, {noise(rng), noise(rng), noise(rng)});
        check(Model::gaussian(sem));
        ++gaussian;
    }
    for (int i = 0; i < 50; ++i) {
        auto row = [&] {
            const double p = prob(rng);
            return std::vector<double>{1 - p, p};
        };
        std::vector<Cpt> cpts{Cpt{0, {}, {row()}}, Cpt{1, {0}, {row(), row()}}, Cpt{2, {1}, {row(), row()}}};
        DiscreteBayesNet net(chain, {{"0", "1"}, {"0", "1"}, {"0", "1"}}, cpts);
        check(Model::discrete(std::move(net), DiscreteScore::MutualInformation));
        ++discrete;
    }
    c.note(std::to_string(gaussian) + " gaussian + " + std::to_string(discrete) +
           " discrete chains, min phi gap=" + fmt("%.2e", minGap));
}

// 7. Selection strategies vs. the boundary oracle.
void selectionDemo(Criterion& c) {
    const Model sib = fixtures::sibling();
    const auto top1 = selectTopK(sib.game(), 1);
    const auto mb = selectMarkovBoundary(sib.graph(), sib.game(), sib.playerVariables());
    c.require(top1.selected == players(sib, {"S"}), "top-1 selects S");
    c.require(std::abs(top1.performance - 9.0 / 16) <= 1e-9, "top-1 performance");
    c.require(std::abs(mb.performance - 3.0 / 4) <= 1e-9, "oracle performance");
    const auto cmp = compareStrategies({top1, mb}, sib.game(), sib.graph(), sib.playerVariables());
    c.require(std::abs(cmp.strategies[0].gap - 3.0 / 16) <= 1e-9, "gap 3/16");

    const Model cc = fixtures::commonCause();
    const auto rfe = selectRfe(cc.game(), 2);
    const SubsetMask boundary = players(cc, {"A", "B"});
    const bool keepsC = rfe.selected.contains(players(cc, {"C"}).members()[0]);
    const bool dropsMember = !boundary.isSubsetOf(rfe.selected);
    c.require(keepsC || dropsMember, "rfe keeps C or drops a boundary member");
    const auto rc = compareStrategies({rfe}, cc.game(), cc.graph(), cc.playerVariables()).strategies[0];
    c.require(!rc.minimalOptimal, "flagged non-minimal");
    c.require(rc.optimal == !dropsMember, "optimality flag consistent");
    c.require(!dropsMember || rc.gap > 0.0, "suboptimal gap positive");
    std::string kept;
    for (VariableId p : rfe.selected.members()) kept += cc.game().playerNames()[p];
    c.note("top-1 gap=" + fmt("%.6f", cmp.strategies[0].gap) + "; rfe keeps {" + kept + "} performance " +
           fmt("%.4f", rfe.performance) + " gap " + fmt("%.4f", rc.gap));
}

// 8. Monte Carlo coverage and stratified/unstratified agreement.
void monteCarlo(Criterion& c) {
    const Model m = fixtures::sibling();
    const auto exact = exactShapley(m.game());
    const SubsetMask boundary = players(m, {"A", "B", "C"});
    const std::size_t n = exact.values.size();
    std::size_t covered = 0;
    std::vector<double> meanPlain(n, 0.0), meanStrat(n, 0.0), varPlain(n, 0.0), varStrat(n, 0.0);
    const int runs = 100;
    for (int seed = 0; seed < runs; ++seed) {
        const auto plain = monteCarloShapley(m.game(), {.samples = 100000, .seed = static_cast<std::uint64_t>(seed)});
        const auto strat = monteCarloShapley(
            m.game(), {.samples = 100000, .seed = static_cast<std::uint64_t>(1000 + seed), .strata = boundary});
        c.require(strat.method == "monte_carlo_stratified", "stratified mode used");
        bool all = true;
        for (std::size_t i = 0; i < n; ++i) {
            c.require(plain.standardErrors[i] > 0.0, "positive standard error");
            all = all && std::abs(plain.values[i] - exact.values[i]) <= 3.0 * plain.standardErrors[i];
            meanPlain[i] += plain.values[i] / runs;
            meanStrat[i] += strat.values[i] / runs;
            varPlain[i] += plain.standardErrors[i] * plain.standardErrors[i] / (runs * runs);
            varStrat[i] += strat.standardErrors[i] * strat.standardErrors[i] / (runs * runs);
        }
        covered += all;
    }
    c.require(covered >= 95, "coverage");
    double worstZ = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = std::abs(meanPlain[i] - meanStrat[i]) / std::sqrt(varPlain[i] + varStrat[i]);
        worstZ = std::max(worstZ, z);
        c.require(z <= 3.0, "stratified vs plain");
    }
    c.note(std::to_string(covered) + "/100 runs fully within 3 SE; max |plain-stratified| = " + fmt("%.2f", worstZ) +
           " combined SE");
}

// 9. Faithfulness verification on bundled networks.
void faithfulness(Criterion& c) {
    const auto cc = verifyFaithfulness(fixtures::commonCause().discreteNet(), 1e-9);
    const auto x = verifyFaithfulness(fixtures::xorCollider().discreteNet(), 1e-9);
    c.require(cc.empty(), "common-cause network has no violations");
    c.require(!x.empty(), "parity network has violations");
    // The Gaussian network has no discrete tables; check its covariance
    // instead: every d-connected (X, T) pair has non-zero partial correlation
    // given every conditioning set, and every d-separated pair has zero.
    const Model sib = fixtures::sibling();
    const Dag& g = sib.graph();
    const VariableId t = g.target();
    std::size_t gaussianViolations = 0;
    const SubsetMask others = g.nonTargetMask();
    for (VariableId xv : others.members()) {
        const SubsetMask rest = others.without(xv);
        std::uint32_t sub = 0;
        while (true) {
            const SubsetMask z(sub);
            const double gain = rSquaredM(sib.covariance(), t, z.with(xv)) - rSquaredM(sib.covariance(), t, z);
            const bool independent = std::abs(gain) <= 1e-9;
            if (independent != dSeparated(g, xv, t, z)) ++gaussianViolations;
            if (sub == rest.bits()) break;
            sub = (sub - rest.bits()) & rest.bits();
        }
    }
    c.require(gaussianViolations == 0, "gaussian network faithful");
    c.note("common-cause violations=" + std::to_string(cc.size()) + ", gaussian violations=" +
           std::to_string(gaussianViolations) + ", parity violations=" + std::to_string(x.size()));
}

// 10. Prevalence simulation properties and runtime.
void prevalence(Criterion& c) {
    const SimConfig defaults = loadSimConfigFile(fixtures::modelPath("default_sim.json"));
    const auto t0 = Clock::now();
    const auto a = runPrevalence(defaults);
    const double t = secondsSince(t0);
    c.require(t < 120.0, "default runtime");
    c.require(a.networks() == 200, "default network count");
    c.require(a == runPrevalence(defaults), "determinism");
    for (const auto& r : a.records) {
        c.require(!r.e2 || r.e1, "E2 implies E1");
        c.require(r.axiomsHold, "axioms re-verified");
    }

    SimConfig seeded = defaults;
    seeded.nNetworks = 50;
    seeded.replay = {fixtures::sibling()};
    const auto b = runPrevalence(seeded);
    c.require(b.e1.count > 0, "non-zero E1 frequency");
    for (const auto& r : b.records) {
        c.require(!r.e2 || r.e1, "E2 implies E1");
        c.require(r.axiomsHold, "axioms re-verified");
    }
    c.note("default: E1=" + fmt("%.3f", a.e1.rate) + " E2=" + fmt("%.3f", a.e2.rate) + " E3=" +
           fmt("%.3f", a.e3.rate) + " t=" + fmt("%.2fs", t) + "; seeded with sibling replay: E1 count=" +
           std::to_string(b.e1.count));
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<void(Criterion&)>>> criteria{
        {"exact sibling-network reproduction", siblingReproduction},
        {"common-cause network reproduction", commonCauseReproduction},
        {"subset formula equals permutation oracle", oracleEquivalence},
        {"axiom suite", axiomSuite},
        {"summand structure matches graph", summandStructure},
        {"nearer cause dominates on chains", chainSuite},
        {"feature-selection demonstration", selectionDemo},
        {"Monte Carlo coverage and stratification", monteCarlo},
        {"faithfulness verification", faithfulness},
        {"prevalence simulation properties", prevalence},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Criterion c;
        try {
            criteria[i].second(c);
        } catch (const std::exception& e) {
            c.require(false, std::string("exception: ") + e.what());
        }
        std::printf("%s %2zu %s:%s\n", c.passed() ? "PASS" : "FAIL", i + 1, criteria[i].first, c.detail().c_str());
        std::fflush(stdout);
        failed += !c.passed();
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
