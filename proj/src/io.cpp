#include "bnshap/io.hpp"

#include "bnshap/error.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

namespace bnshap {

using nlohmann::json;

namespace {

// Field-path aware accessors so schema errors say where they happened.
[[noreturn]] void fieldError(const std::string& path, const std::string& msg) {
    throwInput("model schema error at '" + path + "': " + msg);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) fieldError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fieldError(path.empty() ? key : path + "." + key, "missing required field");
    return *it;
}

std::string asString(const json& j, const std::string& path) {
    if (!j.is_string()) fieldError(path, "expected a string");
    return j.get<std::string>();
}

double asNumber(const json& j, const std::string& path) {
    if (!j.is_number()) fieldError(path, "expected a number");
    return j.get<double>();
}

std::uint64_t asUnsigned(const json& j, const std::string& path) {
    if (!j.is_number_integer() || (j.is_number_integer() && j.get<std::int64_t>() < 0 && !j.is_number_unsigned())) {
        fieldError(path, "expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

const json& asArray(const json& j, const std::string& path) {
    if (!j.is_array()) fieldError(path, "expected an array");
    return j;
}

void rejectUnknownKeys(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.contains(it.key())) {
            fieldError(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
        }
    }
}

std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

json parseText(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into a line/column pair.
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t end = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throwInput(what + " is not valid JSON (line " + std::to_string(line) + ", column " + std::to_string(col) +
                   ")");
    }
}

std::vector<std::string> maskNames(SubsetMask m, const std::vector<std::string>& names) {
    std::vector<std::string> out;
    for (VariableId v : m.members()) out.push_back(names.at(v));
    return out;
}

std::string weightString(const Weight& w) {
    return std::to_string(w.numerator()) + "/" + std::to_string(w.denominator());
}

Weight weightFromString(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) throwInput("weight '" + s + "' is not a fraction");
    return Weight(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
}

}  // namespace

std::string readTextFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throwInput("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Model parseModel(const json& doc) {
    if (!doc.is_object()) fieldError("", "model document must be an object");
    rejectUnknownKeys(doc,
                      {"schema_version", "type", "description", "faithful", "score", "variables", "edges", "target",
                       "cpts", "coefficients", "noise_variance"},
                      "");
    if (doc.contains("schema_version") && asUnsigned(doc["schema_version"], "schema_version") != kSchemaVersion) {
        fieldError("schema_version", "unsupported version");
    }
    const std::string type = asString(require(doc, "type", ""), "type");
    if (type != "discrete" && type != "gaussian") fieldError("type", "expected \"discrete\" or \"gaussian\"");
    const bool discrete = type == "discrete";

    // variables
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> labels;
    const json& vars = asArray(require(doc, "variables", ""), "variables");
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const std::string path = idx("variables", i);
        const json& v = vars[i];
        if (v.is_string()) {
            if (discrete) fieldError(path, "discrete variables need an object with \"name\" and \"states\"");
            names.push_back(v.get<std::string>());
            continue;
        }
        rejectUnknownKeys(v, {"name", "states"}, path);
        names.push_back(asString(require(v, "name", path), path + ".name"));
        if (discrete) {
            const json& states = asArray(require(v, "states", path), path + ".states");
            std::vector<std::string> ls;
            for (std::size_t s = 0; s < states.size(); ++s) ls.push_back(asString(states[s], idx(path + ".states", s)));
            labels.push_back(std::move(ls));
        } else if (v.contains("states")) {
            fieldError(path + ".states", "gaussian variables have no states");
        }
    }

    auto lookup = [&](const json& j, const std::string& path) -> VariableId {
        const std::string name = asString(j, path);
        for (std::size_t v = 0; v < names.size(); ++v) {
            if (names[v] == name) return v;
        }
        fieldError(path, "undeclared variable '" + name + "'");
    };

    std::vector<std::pair<VariableId, VariableId>> edges;
    if (doc.contains("edges")) {
        const json& es = asArray(doc["edges"], "edges");
        for (std::size_t i = 0; i < es.size(); ++i) {
            const std::string path = idx("edges", i);
            if (!es[i].is_array() || es[i].size() != 2) fieldError(path, "expected [parent, child]");
            edges.emplace_back(lookup(es[i][0], path + "[0]"), lookup(es[i][1], path + "[1]"));
        }
    }
    const VariableId target = lookup(require(doc, "target", ""), "target");
    Dag g(names, edges, target);

    Model model = [&] {
        if (discrete) {
            if (doc.contains("coefficients") || doc.contains("noise_variance")) {
                fieldError("coefficients", "not allowed in a discrete model");
            }
            const json& cs = asArray(require(doc, "cpts", ""), "cpts");
            std::vector<Cpt> cpts;
            for (std::size_t i = 0; i < cs.size(); ++i) {
                const std::string path = idx("cpts", i);
                rejectUnknownKeys(cs[i], {"variable", "parents", "table"}, path);
                Cpt cpt;
                cpt.variable = lookup(require(cs[i], "variable", path), path + ".variable");
                if (cs[i].contains("parents")) {
                    const json& ps = asArray(cs[i]["parents"], path + ".parents");
                    for (std::size_t p = 0; p < ps.size(); ++p) {
                        cpt.parentOrder.push_back(lookup(ps[p], idx(path + ".parents", p)));
                    }
                }
                const json& rows = asArray(require(cs[i], "table", path), path + ".table");
                for (std::size_t r = 0; r < rows.size(); ++r) {
                    const std::string rp = idx(path + ".table", r);
                    const json& row = asArray(rows[r], rp);
                    std::vector<double> probs;
                    for (std::size_t k = 0; k < row.size(); ++k) probs.push_back(asNumber(row[k], idx(rp, k)));
                    cpt.rows.push_back(std::move(probs));
                }
                cpts.push_back(std::move(cpt));
            }
            const DiscreteScore score =
                doc.contains("score") ? discreteScoreFromString(asString(doc["score"], "score")) : DiscreteScore::Accuracy;
            return Model::discrete(DiscreteBayesNet(g, labels, std::move(cpts)), score);
        }
        if (doc.contains("cpts")) fieldError("cpts", "not allowed in a gaussian model");
        if (doc.contains("score") && asString(doc["score"], "score") != "r_squared") {
            fieldError("score", "gaussian models use r_squared");
        }
        std::map<LinearGaussianSem::Edge, double> coefficients;
        if (doc.contains("coefficients")) {
            const json& cs = asArray(doc["coefficients"], "coefficients");
            for (std::size_t i = 0; i < cs.size(); ++i) {
                const std::string path = idx("coefficients", i);
                rejectUnknownKeys(cs[i], {"from", "to", "weight"}, path);
                const VariableId from = lookup(require(cs[i], "from", path), path + ".from");
                const VariableId to = lookup(require(cs[i], "to", path), path + ".to");
                if (!g.hasEdge(from, to)) fieldError(path, "coefficient for a pair that is not an edge");
                if (!coefficients.emplace(std::make_pair(from, to), asNumber(require(cs[i], "weight", path), path + ".weight")).second) {
                    fieldError(path, "duplicate coefficient");
                }
            }
        }
        const json& nv = require(doc, "noise_variance", "");
        if (!nv.is_object()) fieldError("noise_variance", "expected an object keyed by variable name");
        std::vector<double> noise(names.size(), 0.0);
        std::vector<bool> seen(names.size(), false);
        for (auto it = nv.begin(); it != nv.end(); ++it) {
            const VariableId v = lookup(json(it.key()), "noise_variance." + it.key());
            noise[v] = asNumber(it.value(), "noise_variance." + it.key());
            seen[v] = true;
        }
        for (std::size_t v = 0; v < names.size(); ++v) {
            if (!seen[v]) fieldError("noise_variance." + names[v], "missing noise variance");
        }
        return Model::gaussian(LinearGaussianSem(g, std::move(coefficients), std::move(noise)));
    }();
    if (doc.contains("description")) model.description = asString(doc["description"], "description");
    return model;
}

Model parseModelText(const std::string& text) { return parseModel(parseText(text, "model file")); }

Model loadModelFile(const std::string& path) { return parseModelText(readTextFile(path)); }

json modelToJson(const Model& model) {
    const Dag& g = model.graph();
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["type"] = model.isDiscrete() ? "discrete" : "gaussian";
    if (!model.description.empty()) doc["description"] = model.description;
    doc["target"] = g.name(g.target());
    json edges = json::array();
    for (const auto& [from, to] : g.edges()) edges.push_back({g.name(from), g.name(to)});
    doc["edges"] = edges;
    json vars = json::array();
    if (model.isDiscrete()) {
        const DiscreteBayesNet& net = model.discreteNet();
        doc["score"] = toString(model.score());
        for (VariableId v = 0; v < g.size(); ++v) vars.push_back({{"name", g.name(v)}, {"states", net.stateLabels(v)}});
        json cpts = json::array();
        for (VariableId v = 0; v < g.size(); ++v) {
            const Cpt& cpt = net.cpt(v);
            json parents = json::array();
            for (VariableId p : cpt.parentOrder) parents.push_back(g.name(p));
            cpts.push_back({{"variable", g.name(v)}, {"parents", parents}, {"table", cpt.rows}});
        }
        doc["cpts"] = cpts;
    } else {
        const LinearGaussianSem& sem = model.sem();
        for (VariableId v = 0; v < g.size(); ++v) vars.push_back(g.name(v));
        json coefficients = json::array();
        for (const auto& [edge, w] : sem.coefficients()) {
            coefficients.push_back({{"from", g.name(edge.first)}, {"to", g.name(edge.second)}, {"weight", w}});
        }
        doc["coefficients"] = coefficients;
        json noise = json::object();
        for (VariableId v = 0; v < g.size(); ++v) noise[g.name(v)] = sem.noiseVariance(v);
        doc["noise_variance"] = noise;
    }
    doc["variables"] = vars;
    return doc;
}

SimConfig parseSimConfig(const json& doc) {
    if (!doc.is_object()) fieldError("", "simulation config must be an object");
    rejectUnknownKeys(doc,
                      {"schema_version", "n_vars", "edge_probability", "parameterization", "min_cpt_prob",
                       "coefficient_range", "noise_variance_range", "score", "n_networks", "seed", "replay"},
                      "");
    SimConfig c;
    if (doc.contains("n_vars")) c.nVars = asUnsigned(doc["n_vars"], "n_vars");
    if (doc.contains("edge_probability")) c.edgeProbability = asNumber(doc["edge_probability"], "edge_probability");
    if (doc.contains("parameterization")) {
        c.parameterization = parameterizationFromString(asString(doc["parameterization"], "parameterization"));
    }
    if (doc.contains("min_cpt_prob")) c.minCptProb = asNumber(doc["min_cpt_prob"], "min_cpt_prob");
    auto range = [&](const char* key, std::pair<double, double>& out) {
        if (!doc.contains(key)) return;
        const json& r = asArray(doc[key], key);
        if (r.size() != 2) fieldError(key, "expected [low, high]");
        out = {asNumber(r[0], std::string(key) + "[0]"), asNumber(r[1], std::string(key) + "[1]")};
    };
    range("coefficient_range", c.coefficientRange);
    range("noise_variance_range", c.noiseVarianceRange);
    if (doc.contains("score")) c.score = discreteScoreFromString(asString(doc["score"], "score"));
    if (doc.contains("n_networks")) c.nNetworks = asUnsigned(doc["n_networks"], "n_networks");
    if (doc.contains("seed")) c.seed = asUnsigned(doc["seed"], "seed");
    if (doc.contains("replay")) {
        const json& rs = asArray(doc["replay"], "replay");
        for (std::size_t i = 0; i < rs.size(); ++i) {
            try {
                c.replay.push_back(parseModel(rs[i]));
            } catch (const Error& e) {
                throw Error(e.kind(), idx("replay", i) + ": " + e.what());
            }
        }
    }
    c.validate();
    return c;
}

SimConfig parseSimConfigText(const std::string& text) { return parseSimConfig(parseText(text, "config file")); }

SimConfig loadSimConfigFile(const std::string& path) { return parseSimConfigText(readTextFile(path)); }

json maskToJson(SubsetMask mask, const std::vector<std::string>& names) { return maskNames(mask, names); }

json toJson(const ShapleyReport& r) {
    json j;
    j["method"] = r.method;
    j["players"] = r.players;
    j["values"] = r.values;
    j["standard_errors"] = r.standardErrors;
    json weights = json::array();
    for (const auto& w : r.weights) weights.push_back(weightString(w));
    j["weights"] = weights;
    j["baseline"] = r.baseline;
    j["grand_value"] = r.grandValue;
    j["efficiency_residual"] = r.efficiencyResidual();
    j["samples"] = r.samples;
    j["summand_count"] = r.summands.empty() ? 0 : r.summands.size() * r.summands.front().size();
    // summands[player] is listed in increasing coalition-bitmask order over
    // the other players.
    j["summands"] = r.summands;
    return j;
}

ShapleyReport shapleyReportFromJson(const json& j) {
    ShapleyReport r;
    r.method = j.at("method").get<std::string>();
    r.players = j.at("players").get<std::vector<std::string>>();
    r.values = j.at("values").get<std::vector<double>>();
    r.standardErrors = j.at("standard_errors").get<std::vector<double>>();
    for (const auto& w : j.at("weights")) r.weights.push_back(weightFromString(w.get<std::string>()));
    r.baseline = j.at("baseline").get<double>();
    r.grandValue = j.at("grand_value").get<double>();
    r.samples = j.at("samples").get<std::uint64_t>();
    r.summands = j.at("summands").get<std::vector<std::vector<double>>>();
    return r;
}

json toJson(const AxiomFindings& f, const std::vector<std::string>& players) {
    json j;
    j["efficiency"] = {{"holds", f.efficiency}, {"residual", f.efficiencyResidual}};
    json sym = json::array();
    for (const auto& [a, b] : f.symmetryViolations) sym.push_back({players.at(a), players.at(b)});
    j["symmetry_violations"] = sym;
    json dummy = json::array();
    for (VariableId p : f.dummyViolations) dummy.push_back(players.at(p));
    j["dummy_violations"] = dummy;
    if (f.additivity) j["additivity"] = {{"holds", *f.additivity}, {"max_error", f.additivityMaxError}};
    j["all_hold"] = f.allHold();
    return j;
}

json toJson(const SummandStructure& s, const Dag& g) {
    json vars = json::array();
    for (const auto& f : s.variables) {
        json v;
        v["variable"] = f.name;
        v["relation"] = toString(f.relation);
        v["all_positive"] = f.allPositive;
        v["some_zero"] = f.someZero;
        v["all_zero"] = f.allZero;
        v["has_negative"] = f.hasNegative;
        v["zero_witness"] = f.zeroWitness ? json(maskNames(*f.zeroWitness, g.names())) : json(nullptr);
        v["matches_graph"] = f.matchesGraph;
        vars.push_back(v);
    }
    return {{"variables", vars}, {"mismatches", s.mismatches()}};
}

json toJson(const SelectionResult& r, const std::vector<std::string>& players) {
    json j;
    j["strategy"] = toString(r.strategy);
    j["selected"] = maskNames(r.selected, players);
    j["performance"] = r.performance;
    json trace = json::array();
    for (const auto& step : r.trace) {
        json phi = json::object();
        for (std::size_t i = 0; i < step.survivors.size(); ++i) phi[players.at(step.survivors[i])] = step.phi[i];
        trace.push_back({{"step", step.step},
                         {"variable", players.at(step.player)},
                         {"action", step.removed ? "removed" : "kept"},
                         {"phi", phi}});
    }
    j["trace"] = trace;
    return j;
}

json toJson(const ComparisonReport& r, const std::vector<std::string>& players) {
    json j;
    j["markov_boundary"] = maskNames(r.markovBoundary, players);
    j["oracle_performance"] = r.oraclePerformance;
    json rows = json::array();
    for (const auto& c : r.strategies) {
        rows.push_back({{"strategy", toString(c.strategy)},
                        {"selected", maskNames(c.selected, players)},
                        {"performance", c.performance},
                        {"gap", c.gap},
                        {"optimal", c.optimal},
                        {"minimal_optimal", c.minimalOptimal},
                        {"missed", maskNames(c.missed, players)},
                        {"redundant", maskNames(c.redundant, players)}});
    }
    j["strategies"] = rows;
    return j;
}

namespace {

json frequencyJson(const Frequency& f) {
    return {{"count", f.count}, {"rate", f.rate}, {"ci_low", f.ciLow}, {"ci_high", f.ciHigh}};
}

Frequency frequencyFromJson(const json& j) {
    Frequency f;
    f.count = j.at("count").get<std::size_t>();
    f.rate = j.at("rate").get<double>();
    f.ciLow = j.at("ci_low").get<double>();
    f.ciHigh = j.at("ci_high").get<double>();
    return f;
}

}  // namespace

json toJson(const PrevalenceReport& r) {
    json records = json::array();
    for (const auto& rec : r.records) {
        records.push_back({{"index", rec.index},
                           {"replayed", rec.replayed},
                           {"mb_size", rec.mbSize},
                           {"max_non_mb_phi", rec.maxNonMbPhi},
                           {"min_mb_phi", rec.minMbPhi},
                           {"sum_mb_phi", rec.sumMbPhi},
                           {"e1", rec.e1},
                           {"e2", rec.e2},
                           {"e3", rec.e3},
                           {"efficiency_residual", rec.efficiencyResidual},
                           {"axioms_hold", rec.axiomsHold}});
    }
    return {{"networks", r.networks()},
            {"frequencies", {{"e1", frequencyJson(r.e1)}, {"e2", frequencyJson(r.e2)}, {"e3", frequencyJson(r.e3)}}},
            {"records", records}};
}

PrevalenceReport prevalenceReportFromJson(const json& j) {
    PrevalenceReport r;
    for (const auto& x : j.at("records")) {
        NetworkRecord rec;
        rec.index = x.at("index").get<std::uint64_t>();
        rec.replayed = x.at("replayed").get<bool>();
        rec.mbSize = x.at("mb_size").get<std::size_t>();
        rec.maxNonMbPhi = x.at("max_non_mb_phi").get<double>();
        rec.minMbPhi = x.at("min_mb_phi").get<double>();
        rec.sumMbPhi = x.at("sum_mb_phi").get<double>();
        rec.e1 = x.at("e1").get<bool>();
        rec.e2 = x.at("e2").get<bool>();
        rec.e3 = x.at("e3").get<bool>();
        rec.efficiencyResidual = x.at("efficiency_residual").get<double>();
        rec.axiomsHold = x.at("axioms_hold").get<bool>();
        r.records.push_back(rec);
    }
    const json& f = j.at("frequencies");
    r.e1 = frequencyFromJson(f.at("e1"));
    r.e2 = frequencyFromJson(f.at("e2"));
    r.e3 = frequencyFromJson(f.at("e3"));
    return r;
}

json envelope(const std::string& command, const json& payload, std::optional<std::uint64_t> seed) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
    json j;
    j["schema_version"] = kSchemaVersion;
    j["tool"] = "bnshap";
    j["version"] = kVersion;
    j["command"] = command;
    j["seed"] = seed ? json(*seed) : json(nullptr);
    j["generated_at"] = stamp;
    j["payload"] = payload;
    return j;
}

}  // namespace bnshap
