#include "bnshap/bnshap.h"

#include "bnshap/analysis.hpp"
#include "bnshap/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct bnshap_model {
    bnshap::Model model;
};

namespace {

thread_local std::string lastError;

bnshap_status statusOf(bnshap::ErrorKind kind) {
    switch (kind) {
        case bnshap::ErrorKind::Input: return BNSHAP_ERR_INPUT;
        case bnshap::ErrorKind::Capacity: return BNSHAP_ERR_CAPACITY;
        case bnshap::ErrorKind::Numerical: return BNSHAP_ERR_NUMERICAL;
        case bnshap::ErrorKind::Domain: return BNSHAP_ERR_DOMAIN;
    }
    return BNSHAP_ERR_INTERNAL;
}

template <class F>
bnshap_status guarded(F&& fn) {
    try {
        fn();
        lastError.clear();
        return BNSHAP_OK;
    } catch (const bnshap::Error& e) {
        lastError = e.what();
        return statusOf(e.kind());
    } catch (const nlohmann::json::exception& e) {
        lastError = e.what();
        return BNSHAP_ERR_INPUT;
    } catch (const std::bad_alloc&) {
        lastError = "out of memory";
        return BNSHAP_ERR_CAPACITY;
    } catch (const std::exception& e) {
        lastError = e.what();
        return BNSHAP_ERR_INTERNAL;
    }
}

char* duplicate(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void requireArg(const void* p, const char* name) {
    if (p == nullptr) bnshap::throwInput(std::string(name) + " must not be null");
}

}  // namespace

extern "C" {

const char* bnshap_version(void) { return bnshap::kVersion; }

const char* bnshap_last_error(void) { return lastError.c_str(); }

void bnshap_string_free(char* s) { std::free(s); }

bnshap_status bnshap_model_load_file(const char* path, bnshap_model** out) {
    return guarded([&] {
        requireArg(path, "path");
        requireArg(out, "out");
        *out = new bnshap_model{bnshap::loadModelFile(path)};
    });
}

bnshap_status bnshap_model_load_json(const char* json, bnshap_model** out) {
    return guarded([&] {
        requireArg(json, "json");
        requireArg(out, "out");
        *out = new bnshap_model{bnshap::parseModelText(json)};
    });
}

void bnshap_model_free(bnshap_model* model) { delete model; }

bnshap_status bnshap_model_num_players(const bnshap_model* model, size_t* out) {
    return guarded([&] {
        requireArg(model, "model");
        requireArg(out, "out");
        *out = model->model.game().numPlayers();
    });
}

bnshap_status bnshap_model_player_name(const bnshap_model* model, size_t player, const char** out) {
    return guarded([&] {
        requireArg(model, "model");
        requireArg(out, "out");
        const auto& names = model->model.game().playerNames();
        if (player >= names.size()) bnshap::throwInput("player index out of range");
        *out = names[player].c_str();
    });
}

bnshap_status bnshap_model_value(const bnshap_model* model, uint32_t player_mask, double* out) {
    return guarded([&] {
        requireArg(model, "model");
        requireArg(out, "out");
        *out = model->model.game().value(bnshap::SubsetMask(player_mask));
    });
}

bnshap_status bnshap_model_markov_boundary(const bnshap_model* model, uint32_t* player_mask) {
    return guarded([&] {
        requireArg(model, "model");
        requireArg(player_mask, "player_mask");
        *player_mask = model->model.toPlayerMask(bnshap::markovBoundary(model->model.graph())).bits();
    });
}

bnshap_status bnshap_model_to_json(const bnshap_model* model, char** out_json) {
    return guarded([&] {
        requireArg(model, "model");
        requireArg(out_json, "out_json");
        *out_json = duplicate(bnshap::modelToJson(model->model).dump(2));
    });
}

bnshap_status bnshap_exact_shapley(const bnshap_model* model, double* phi, size_t len) {
    return guarded([&] {
        requireArg(model, "model");
        requireArg(phi, "phi");
        const auto report = bnshap::exactShapley(model->model.game(), {.keepSummands = false});
        if (len < report.values.size()) bnshap::throwInput("output buffer is too small");
        std::copy(report.values.begin(), report.values.end(), phi);
    });
}

bnshap_status bnshap_pairwise_diff(const bnshap_model* model, size_t i, size_t j, double* out) {
    return guarded([&] {
        requireArg(model, "model");
        requireArg(out, "out");
        *out = bnshap::pairwiseShapleyDiff(model->model.game(), i, j);
    });
}

bnshap_status bnshap_shapley_json(const bnshap_model* model, const bnshap_shapley_options* options, char** out_json) {
    return guarded([&] {
        requireArg(model, "model");
        requireArg(out_json, "out_json");
        bnshap::ShapleyCommand cmd;
        if (options != nullptr) {
            if (options->mc_samples > 0) cmd.monteCarloSamples = options->mc_samples;
            cmd.seed = options->seed;
            cmd.stratifyByMarkovBoundary = options->stratify_mb != 0;
        }
        *out_json = duplicate(bnshap::shapleyPayload(model->model, cmd).dump());
    });
}

bnshap_status bnshap_structure_json(const bnshap_model* model, const char* query, const char* const* args,
                                    size_t nargs, double tol, char** out_json) {
    return guarded([&] {
        requireArg(model, "model");
        requireArg(query, "query");
        requireArg(out_json, "out_json");
        if (nargs > 0) requireArg(args, "args");
        std::vector<std::string> a;
        for (size_t i = 0; i < nargs; ++i) {
            requireArg(args[i], "args[i]");
            a.emplace_back(args[i]);
        }
        *out_json = duplicate(bnshap::structurePayload(model->model, query, a, tol).dump());
    });
}

bnshap_status bnshap_select_json(const bnshap_model* model, const char* strategy, size_t k, char** out_json) {
    return guarded([&] {
        requireArg(model, "model");
        requireArg(strategy, "strategy");
        requireArg(out_json, "out_json");
        *out_json = duplicate(bnshap::selectPayload(model->model, bnshap::strategyFromString(strategy), k).dump());
    });
}

bnshap_status bnshap_verify_theorems_json(const bnshap_model* model, double tol, char** out_json) {
    return guarded([&] {
        requireArg(model, "model");
        requireArg(out_json, "out_json");
        *out_json = duplicate(bnshap::verifyTheoremsPayload(model->model, tol).dump());
    });
}

bnshap_status bnshap_simulate_json(const char* config_json, char** out_json) {
    return guarded([&] {
        requireArg(config_json, "config_json");
        requireArg(out_json, "out_json");
        *out_json = duplicate(bnshap::simulatePayload(bnshap::parseSimConfigText(config_json)).dump());
    });
}

bnshap_status bnshap_simulate_file_json(const char* config_path, char** out_json) {
    return guarded([&] {
        requireArg(config_path, "config_path");
        requireArg(out_json, "out_json");
        *out_json = duplicate(bnshap::simulatePayload(bnshap::loadSimConfigFile(config_path)).dump());
    });
}

bnshap_status bnshap_envelope_json(const char* command, const char* payload_json, int has_seed, uint64_t seed,
                                   char** out_json) {
    return guarded([&] {
        requireArg(command, "command");
        requireArg(payload_json, "payload_json");
        requireArg(out_json, "out_json");
        const auto payload = nlohmann::json::parse(payload_json);
        const auto env = bnshap::envelope(command, payload, has_seed ? std::optional<uint64_t>(seed) : std::nullopt);
        *out_json = duplicate(env.dump(2));
    });
}

}  // extern "C"
