// bnshap command-line tool. Talks to the engine only through the C API.

#include "bnshap/bnshap.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitCapacity = 3;

struct CommandFailure {
    int exitCode;
    std::string message;
};

int exitCodeFor(bnshap_status s) {
    switch (s) {
        case BNSHAP_OK: return kExitOk;
        case BNSHAP_ERR_CAPACITY: return kExitCapacity;
        case BNSHAP_ERR_INPUT:
        case BNSHAP_ERR_NUMERICAL:
        case BNSHAP_ERR_DOMAIN: return kExitInput;
        default: return kExitInternal;
    }
}

void check(bnshap_status s) {
    if (s != BNSHAP_OK) throw CommandFailure{exitCodeFor(s), bnshap_last_error()};
}

struct ModelDeleter {
    void operator()(bnshap_model* m) const { bnshap_model_free(m); }
};
using ModelHandle = std::unique_ptr<bnshap_model, ModelDeleter>;

ModelHandle loadModel(const std::string& path) {
    bnshap_model* raw = nullptr;
    check(bnshap_model_load_file(path.c_str(), &raw));
    return ModelHandle(raw);
}

// Takes ownership of a string returned by the C API.
json takeJson(char* text) {
    std::unique_ptr<char, decltype(&bnshap_string_free)> guard(text, &bnshap_string_free);
    return json::parse(text);
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string joinNames(const json& arr) {
    std::string out = "{";
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (i) out += ", ";
        out += arr[i].get<std::string>();
    }
    return out + "}";
}

void emit(const std::string& command, const json& payload, const std::string& format, std::optional<std::uint64_t> seed,
          void (*table)(const json&)) {
    if (format == "table") {
        table(payload);
        return;
    }
    char* out = nullptr;
    check(bnshap_envelope_json(command.c_str(), payload.dump().c_str(), seed.has_value(), seed.value_or(0), &out));
    std::unique_ptr<char, decltype(&bnshap_string_free)> guard(out, &bnshap_string_free);
    std::cout << out << "\n";
}

void shapleyTable(const json& p) {
    std::printf("target %s   score %s   method %s\n", p["target"].get<std::string>().c_str(),
                p["score"].get<std::string>().c_str(), p["method"].get<std::string>().c_str());
    const auto& players = p["players"];
    const auto& values = p["values"];
    const auto& se = p["standard_errors"];
    std::printf("%-4s %-12s %-14s %-14s %s\n", "rank", "variable", "phi", se.empty() ? "" : "std_err", "relation");
    int rank = 1;
    for (const auto& name : p["ranking"]) {
        std::size_t i = 0;
        while (players[i] != name) ++i;
        const std::string n = name.get<std::string>();
        std::printf("%-4d %-12s %-14s %-14s %s\n", rank++, n.c_str(), num(values[i].get<double>()).c_str(),
                    se.empty() ? "" : num(se[i].get<double>()).c_str(),
                    p["relations"][n]["relation"].get<std::string>().c_str());
    }
    std::printf("baseline m(empty) %s   m(all) %s   summands %s   efficiency residual %s\n",
                num(p["baseline"].get<double>()).c_str(), num(p["grand_value"].get<double>()).c_str(),
                std::to_string(p["summand_count"].get<std::size_t>()).c_str(),
                num(p["efficiency_residual"].get<double>()).c_str());
}

void structureTable(const json& p) {
    const std::string q = p["query"];
    if (q == "mb") {
        std::printf("markov boundary of %s: %s\n", p["target"].get<std::string>().c_str(),
                    joinNames(p["markov_boundary"]).c_str());
        std::printf("  parents/children: %s   spouses: %s\n", joinNames(p["parents_children"]).c_str(),
                    joinNames(p["spouses"]).c_str());
    } else if (q == "dsep") {
        std::printf("%s _||_ %s | %s : d-separated: %s\n", p["x"].get<std::string>().c_str(),
                    p["y"].get<std::string>().c_str(), joinNames(p["given"]).c_str(),
                    p["d_separated"].get<bool>() ? "true" : "false");
    } else if (q == "relevance") {
        for (const auto& [name, r] : p["relevance"].items()) {
            std::printf("%-12s %-11s %-13s %s\n", name.c_str(), r["class"].get<std::string>().c_str(),
                        r["relation"].get<std::string>().c_str(), r["causal_reading"].get<std::string>().c_str());
        }
    } else {
        const auto& vs = p["violations"];
        std::printf("faithfulness (%s, tol %s): %s\n", p["scope"].get<std::string>().c_str(),
                    num(p["tolerance"].get<double>()).c_str(),
                    vs.empty() ? "no violations" : (std::to_string(vs.size()) + " violation(s)").c_str());
        for (const auto& v : vs) {
            std::printf("  %s vs %s given %s: %s\n", v["x"].get<std::string>().c_str(), v["y"].get<std::string>().c_str(),
                        joinNames(v["given"]).c_str(), v["direction"].get<std::string>().c_str());
        }
    }
}

void selectTable(const json& p) {
    const auto& r = p["result"];
    std::printf("strategy %s   selected %s   performance %s\n", r["strategy"].get<std::string>().c_str(),
                joinNames(r["selected"]).c_str(), num(r["performance"].get<double>()).c_str());
    for (const auto& step : r["trace"]) {
        std::printf("  step %d: %s %s\n", step["step"].get<int>(), step["action"].get<std::string>().c_str(),
                    step["variable"].get<std::string>().c_str());
    }
    const auto& c = p["comparison"];
    const auto& row = c["strategies"][0];
    std::printf("markov boundary %s (performance %s)\n", joinNames(c["markov_boundary"]).c_str(),
                num(c["oracle_performance"].get<double>()).c_str());
    std::printf("gap %s   optimal %s   minimal-optimal %s   missed %s   redundant %s\n",
                num(row["gap"].get<double>()).c_str(), row["optimal"].get<bool>() ? "yes" : "no",
                row["minimal_optimal"].get<bool>() ? "yes" : "no", joinNames(row["missed"]).c_str(),
                joinNames(row["redundant"]).c_str());
}

void theoremsTable(const json& p) {
    for (const auto& c : p["checks"]) {
        std::printf("[%s] %-26s %s\n", c["passed"].get<bool>() ? "PASS" : "FAIL",
                    c["check"].get<std::string>().c_str(), c["subject"].get<std::string>().c_str());
    }
    std::printf("%s\n", p["all_passed"].get<bool>() ? "all checks passed" : "some checks failed");
}

void simulateTable(const json& p) {
    std::printf("networks %zu\n", p["networks"].get<std::size_t>());
    std::printf("%-4s %-8s %-10s %s\n", "evt", "count", "rate", "95% CI");
    for (const char* e : {"e1", "e2", "e3"}) {
        const auto& f = p["frequencies"][e];
        std::printf("%-4s %-8zu %-10s [%s, %s]\n", e, f["count"].get<std::size_t>(), num(f["rate"].get<double>()).c_str(),
                    num(f["ci_low"].get<double>()).c_str(), num(f["ci_high"].get<double>()).c_str());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact Shapley analysis of predictive games over Bayesian networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", bnshap_version());

    std::string model;
    std::string format = "table";
    double tol = 1e-9;
    auto addCommon = [&](CLI::App* sub, const char* what) {
        sub->add_option("model", model, what)->required();
        sub->add_option("--out", format, "output format")->check(CLI::IsMember({"json", "table"}));
    };

    auto* shapley = app.add_subcommand("shapley", "Shapley value of every non-target variable");
    addCommon(shapley, "model file (JSON)");
    bool exact = false;
    std::uint64_t mc = 0;
    std::uint64_t seed = 0;
    bool stratify = false;
    auto* exactFlag = shapley->add_flag("--exact", exact, "exact enumeration (default)");
    shapley->add_option("--mc", mc, "Monte Carlo permutation samples")->check(CLI::PositiveNumber)->excludes(exactFlag);
    shapley->add_option("--seed", seed, "Monte Carlo seed");
    shapley->add_flag("--stratify-mb", stratify, "stratify permutations by the Markov boundary");

    auto* structure = app.add_subcommand("structure", "graph queries: mb | dsep X Y Z... | relevance | verify-faithfulness");
    addCommon(structure, "model file (JSON)");
    std::string query;
    std::vector<std::string> queryArgs;
    structure->add_option("query", query, "mb, dsep, relevance or verify-faithfulness")
        ->required()
        ->check(CLI::IsMember({"mb", "dsep", "relevance", "verify-faithfulness"}));
    structure->add_option("args", queryArgs, "query arguments");
    structure->add_option("--tol", tol, "independence tolerance")->check(CLI::PositiveNumber);

    auto* select = app.add_subcommand("select", "Shapley-based feature selection vs. the Markov boundary");
    addCommon(select, "model file (JSON)");
    std::string strategy;
    std::size_t k = 0;
    select->add_option("--strategy", strategy, "topk, rfe or mb")->required()->check(CLI::IsMember({"topk", "rfe", "mb"}));
    auto* kOpt = select->add_option("--k", k, "set size (topk) or stop size (rfe)")->check(CLI::PositiveNumber);

    auto* theorems = app.add_subcommand("verify-theorems", "summand structure, pairwise dominance and axioms");
    addCommon(theorems, "model file (JSON)");
    theorems->add_option("--tol", tol, "zero tolerance for summands")->check(CLI::PositiveNumber);

    auto* simulate = app.add_subcommand("simulate", "prevalence of Shapley / Markov-boundary disagreement");
    std::string configPath;
    simulate->add_option("config", configPath, "simulation config (JSON)")->required();
    simulate->add_option("--out", format, "output format")->check(CLI::IsMember({"json", "table"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (shapley->parsed()) {
            const ModelHandle m = loadModel(model);
            bnshap_shapley_options opts{mc, seed, stratify ? 1 : 0};
            char* out = nullptr;
            check(bnshap_shapley_json(m.get(), &opts, &out));
            emit("shapley", takeJson(out), format, mc > 0 ? std::optional<std::uint64_t>(seed) : std::nullopt,
                 shapleyTable);
        } else if (structure->parsed()) {
            const ModelHandle m = loadModel(model);
            std::vector<const char*> args;
            for (const auto& a : queryArgs) args.push_back(a.c_str());
            char* out = nullptr;
            check(bnshap_structure_json(m.get(), query.c_str(), args.data(), args.size(), tol, &out));
            emit("structure", takeJson(out), format, std::nullopt, structureTable);
        } else if (select->parsed()) {
            if (strategy != "mb" && kOpt->count() == 0) {
                throw CommandFailure{kExitInput, "--k is required for the " + strategy + " strategy"};
            }
            const ModelHandle m = loadModel(model);
            char* out = nullptr;
            check(bnshap_select_json(m.get(), strategy.c_str(), k, &out));
            emit("select", takeJson(out), format, std::nullopt, selectTable);
        } else if (theorems->parsed()) {
            const ModelHandle m = loadModel(model);
            char* out = nullptr;
            check(bnshap_verify_theorems_json(m.get(), tol, &out));
            emit("verify-theorems", takeJson(out), format, std::nullopt, theoremsTable);
        } else if (simulate->parsed()) {
            char* out = nullptr;
            check(bnshap_simulate_file_json(configPath.c_str(), &out));
            const json payload = takeJson(out);
            emit("simulate", payload, format, payload["config"]["seed"].get<std::uint64_t>(), simulateTable);
        }
    } catch (const CommandFailure& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.exitCode;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}
