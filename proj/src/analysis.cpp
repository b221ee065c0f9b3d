#include "bnshap/analysis.hpp"

#include "bnshap/error.hpp"

#include <cmath>

namespace bnshap {

using nlohmann::json;

namespace {

// Causal reading of each relation, valid when the network is a causal one.
const char* causalLabel(StructuralRelation r) {
    switch (r) {
        case StructuralRelation::Parent: return "direct cause";
        case StructuralRelation::Child: return "direct effect";
        case StructuralRelation::Spouse: return "direct cause of a direct effect";
        case StructuralRelation::Connected: return "indirectly connected";
        case StructuralRelation::Disconnected: return "causally unrelated";
    }
    return "?";
}

StructuralRelation relationOf(const Dag& g, VariableId v) {
    const VariableId t = g.target();
    if (g.parents(t).contains(v)) return StructuralRelation::Parent;
    if (g.children(t).contains(v)) return StructuralRelation::Child;
    if (markovBoundary(g).contains(v)) return StructuralRelation::Spouse;
    if (undirectedPathExists(g, v, t)) return StructuralRelation::Connected;
    return StructuralRelation::Disconnected;
}

SubsetMask parseVariableList(const Dag& g, const std::vector<std::string>& names, std::size_t from) {
    SubsetMask z;
    for (std::size_t i = from; i < names.size(); ++i) z = z.with(g.idOf(names[i]));
    return z;
}

}  // namespace

json shapleyPayload(const Model& model, const ShapleyCommand& cmd) {
    const Game& game = model.game();
    const Dag& g = model.graph();
    ShapleyReport report;
    if (cmd.monteCarloSamples) {
        MonteCarloOptions opts;
        opts.samples = *cmd.monteCarloSamples;
        opts.seed = cmd.seed;
        if (cmd.stratifyByMarkovBoundary) opts.strata = model.toPlayerMask(markovBoundary(g));
        report = monteCarloShapley(game, opts);
    } else {
        report = exactShapley(game);
    }
    json j = toJson(report);
    j["target"] = g.name(g.target());
    j["score"] = model.scoreName();
    j["ranking"] = json::array();
    for (VariableId p : rankPlayers(report.values)) j["ranking"].push_back(report.players[p]);
    json relations = json::object();
    for (VariableId p = 0; p < report.players.size(); ++p) {
        const StructuralRelation r = relationOf(g, model.playerVariables()[p]);
        relations[report.players[p]] = {{"relation", toString(r)}, {"causal_reading", causalLabel(r)}};
    }
    j["relations"] = relations;
    return j;
}

json structurePayload(const Model& model, const std::string& query, const std::vector<std::string>& args, double tol) {
    const Dag& g = model.graph();
    json j;
    j["query"] = query;
    j["target"] = g.name(g.target());
    if (query == "mb") {
        if (!args.empty()) throwInput("mb takes no arguments");
        const SubsetMask mb = markovBoundary(g);
        j["markov_boundary"] = maskToJson(mb, g.names());
        j["parents_children"] = maskToJson(parentsChildren(g, g.target()), g.names());
        j["spouses"] = maskToJson(mb - parentsChildren(g, g.target()), g.names());
    } else if (query == "dsep") {
        if (args.size() < 2) throwInput("dsep needs X Y [Z...]");
        const VariableId x = g.idOf(args[0]);
        const VariableId y = g.idOf(args[1]);
        const SubsetMask z = parseVariableList(g, args, 2);
        j["x"] = args[0];
        j["y"] = args[1];
        j["given"] = maskToJson(z, g.names());
        j["d_separated"] = dSeparated(g, x, y, z);
    } else if (query == "relevance") {
        if (!args.empty()) throwInput("relevance takes no arguments");
        const auto classes = classifyRelevance(g);
        json rel = json::object();
        for (VariableId v = 0; v < g.size(); ++v) {
            if (v == g.target()) continue;
            const StructuralRelation r = relationOf(g, v);
            rel[g.name(v)] = {{"class", toString(classes[v])},
                              {"relation", toString(r)},
                              {"causal_reading", causalLabel(r)}};
        }
        j["relevance"] = rel;
    } else if (query == "verify-faithfulness") {
        if (!model.isDiscrete()) throwInput("verify-faithfulness needs a discrete model");
        FaithfulnessScope scope = FaithfulnessScope::TargetPairs;
        if (args.size() == 1 && args[0] == "all-pairs") {
            scope = FaithfulnessScope::AllPairs;
        } else if (!args.empty()) {
            throwInput("verify-faithfulness takes at most the argument 'all-pairs'");
        }
        const auto violations = verifyFaithfulness(model.discreteNet(), tol, scope);
        j["scope"] = scope == FaithfulnessScope::TargetPairs ? "target_pairs" : "all_pairs";
        j["tolerance"] = tol;
        json vs = json::array();
        for (const auto& v : violations) {
            vs.push_back({{"x", g.name(v.x)},
                          {"y", g.name(v.y)},
                          {"given", maskToJson(v.z, g.names())},
                          {"direction", v.independentButConnected ? "independent_but_d_connected"
                                                                  : "dependent_but_d_separated"}});
        }
        j["violations"] = vs;
        j["faithful"] = violations.empty();
    } else {
        throwInput("unknown structure query '" + query + "' (expected mb, dsep, relevance or verify-faithfulness)");
    }
    return j;
}

json selectPayload(const Model& model, Strategy strategy, std::size_t k) {
    const Game& game = model.game();
    const auto& players = game.playerNames();
    SelectionResult result;
    switch (strategy) {
        case Strategy::TopK: result = selectTopK(game, k); break;
        case Strategy::RecursiveElimination: result = selectRfe(game, k); break;
        case Strategy::MarkovBoundaryOracle:
            result = selectMarkovBoundary(model.graph(), game, model.playerVariables());
            break;
    }
    const ComparisonReport cmp = compareStrategies({result}, game, model.graph(), model.playerVariables());
    json j;
    j["score"] = model.scoreName();
    j["result"] = toJson(result, players);
    j["comparison"] = toJson(cmp, players);
    return j;
}

json verifyTheoremsPayload(const Model& model, double tol) {
    const Game& game = model.game();
    const Dag& g = model.graph();
    const auto& players = game.playerNames();
    const ShapleyReport report = exactShapley(game);
    if (report.summands.empty()) throwCapacity("summand verification needs the full summand table");

    json checks = json::array();
    bool all = true;
    auto add = [&](const std::string& check, const std::string& subject, bool passed, json detail) {
        all = all && passed;
        checks.push_back({{"check", check}, {"subject", subject}, {"passed", passed}, {"detail", std::move(detail)}});
    };

    const SummandStructure structure = checkSummandStructure(report, g, tol);
    for (const auto& f : structure.variables) {
        json detail = {{"relation", toString(f.relation)},
                       {"all_positive", f.allPositive},
                       {"some_zero", f.someZero},
                       {"all_zero", f.allZero},
                       {"zero_witness", f.zeroWitness ? maskToJson(*f.zeroWitness, g.names()) : json(nullptr)}};
        switch (f.relation) {
            case StructuralRelation::Parent:
            case StructuralRelation::Child:
                add("pc_summands_positive", f.name, f.matchesGraph, detail);
                break;
            case StructuralRelation::Spouse:
                add("spouse_has_zero_summand", f.name, f.matchesGraph, detail);
                break;
            case StructuralRelation::Connected:
                add("non_pc_has_zero_summand", f.name, f.matchesGraph, detail);
                break;
            case StructuralRelation::Disconnected:
                add("disconnected_all_zero", f.name, f.matchesGraph, detail);
                break;
        }
    }

    // Pairwise dominance: V_i _||_ T | V_j and not V_j _||_ T | V_i  =>  phi_j > phi_i.
    const auto& vars = model.playerVariables();
    for (VariableId i = 0; i < vars.size(); ++i) {
        for (VariableId j = 0; j < vars.size(); ++j) {
            if (i == j) continue;
            const bool iBlocked = dSeparated(g, vars[i], g.target(), SubsetMask::single(vars[j]));
            const bool jBlocked = dSeparated(g, vars[j], g.target(), SubsetMask::single(vars[i]));
            if (!iBlocked || jBlocked) continue;
            const double diff = pairwiseShapleyDiff(game, i, j);
            const double direct = report.values[i] - report.values[j];
            const bool passed = report.values[j] - report.values[i] > tol && std::abs(diff - direct) <= kDefaultTol;
            add("separated_pair_dominance", players[j] + " > " + players[i], passed,
                {{"phi_i", report.values[i]}, {"phi_j", report.values[j]}, {"pairwise_diff", diff}});
        }
    }

    const AxiomFindings axioms = verifyAxioms(game, report, tol);
    add("efficiency", "all", axioms.efficiency, {{"residual", axioms.efficiencyResidual}});
    add("symmetry", "all", axioms.symmetryViolations.empty(), toJson(axioms, players)["symmetry_violations"]);
    add("dummy", "all", axioms.dummyViolations.empty(), toJson(axioms, players)["dummy_violations"]);

    json j;
    j["score"] = model.scoreName();
    j["tolerance"] = tol;
    j["phi"] = json::object();
    for (VariableId p = 0; p < players.size(); ++p) j["phi"][players[p]] = report.values[p];
    j["checks"] = checks;
    j["all_passed"] = all;
    return j;
}

json simulatePayload(const SimConfig& config) {
    json j = toJson(runPrevalence(config));
    j["config"] = {{"n_vars", config.nVars},
                   {"edge_probability", config.edgeProbability},
                   {"parameterization", toString(config.parameterization)},
                   {"min_cpt_prob", config.minCptProb},
                   {"coefficient_range", {config.coefficientRange.first, config.coefficientRange.second}},
                   {"noise_variance_range", {config.noiseVarianceRange.first, config.noiseVarianceRange.second}},
                   {"score", toString(config.score)},
                   {"n_networks", config.nNetworks},
                   {"seed", config.seed},
                   {"replayed_models", config.replay.size()}};
    return j;
}

}  // namespace bnshap
