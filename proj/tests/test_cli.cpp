#include "doctest.h"
#include "json.hpp"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

std::string model(const char* file) { return std::string(BNSHAP_MODELS_DIR) + "/" + file; }

Run run(const std::string& args, bool mergeStderr = false) {
    const std::string cmd = std::string(BNSHAP_CLI_PATH) + " " + args + (mergeStderr ? " 2>&1" : " 2>/dev/null");
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

json runJson(const std::string& args) {
    const Run r = run(args + " --out json");
    REQUIRE(r.code == 0);
    return json::parse(r.out);
}

}  // namespace

TEST_CASE("shapley") {
    const json j = runJson("shapley " + model("sibling_gaussian.json"));
    CHECK(j["tool"] == "bnshap");
    CHECK(j["command"] == "shapley");
    CHECK(j["seed"].is_null());
    CHECK(j["payload"]["players"] == json({"A", "B", "C", "S"}));
    const auto& phi = j["payload"]["values"];
    CHECK(std::abs(phi[3].get<double>() - 49.0 / 192) < 1e-12);
    CHECK(std::abs(phi[0].get<double>() - 95.0 / 576) < 1e-12);
    CHECK(j["payload"]["ranking"][0] == "S");

    const Run table = run("shapley " + model("sibling_gaussian.json"));
    CHECK(table.code == 0);
    CHECK(table.out.find("S") != std::string::npos);
    CHECK(table.out.find("0.255208") != std::string::npos);
}

TEST_CASE("seeded Monte Carlo output is reproducible") {
    const std::string args = "shapley " + model("common_cause_discrete.json") + " --mc 1000 --seed 7";
    const json a = runJson(args);
    const json b = runJson(args);
    CHECK(a["payload"] == b["payload"]);
    CHECK(a["seed"] == 7);
    CHECK(a["payload"] != runJson("shapley " + model("common_cause_discrete.json") + " --mc 1000 --seed 8")["payload"]);
    CHECK(runJson(args + " --stratify-mb")["payload"]["method"].is_string());
}

TEST_CASE("structure queries") {
    const json mb = runJson("structure " + model("sibling_gaussian.json") + " mb");
    CHECK(mb["payload"]["markov_boundary"] == json({"A", "B", "C"}));

    const json dsep = runJson("structure " + model("common_cause_discrete.json") + " dsep T C A B");
    CHECK(dsep["payload"]["d_separated"] == true);
    const json dcon = runJson("structure " + model("common_cause_discrete.json") + " dsep T C");
    CHECK(dcon["payload"]["d_separated"] == false);

    CHECK(run("structure " + model("common_cause_discrete.json") + " relevance").code == 0);
    const json faithful = runJson("structure " + model("common_cause_discrete.json") + " verify-faithfulness");
    CHECK(faithful["payload"]["faithful"] == true);
    const json unfaithful = runJson("structure " + model("xor_collider.json") + " verify-faithfulness");
    CHECK(unfaithful["payload"]["faithful"] == false);

    CHECK(run("structure " + model("sibling_gaussian.json") + " dsep T Q").code == 2);
    CHECK(run("structure " + model("sibling_gaussian.json") + " verify-faithfulness").code == 2);
}

TEST_CASE("select") {
    const json top = runJson("select " + model("sibling_gaussian.json") + " --strategy topk --k 1");
    CHECK(top["command"] == "select");
    CHECK(run("select " + model("sibling_gaussian.json") + " --strategy rfe --k 2").code == 0);
    CHECK(run("select " + model("sibling_gaussian.json") + " --strategy mb").code == 0);
    CHECK(run("select " + model("sibling_gaussian.json") + " --strategy topk --k 0").code == 2);
    CHECK(run("select " + model("sibling_gaussian.json") + " --strategy topk").code == 2);
    CHECK(run("select " + model("sibling_gaussian.json") + " --strategy topk --k 9").code == 2);
    CHECK(run("select " + model("sibling_gaussian.json") + " --strategy greedy --k 1").code == 2);
}

TEST_CASE("verify-theorems") {
    const json ok = runJson("verify-theorems " + model("sibling_gaussian.json"));
    CHECK(ok["payload"]["all_passed"] == true);
    CHECK(run("verify-theorems " + model("common_cause_discrete.json")).code == 0);
}

TEST_CASE("simulate") {
    const auto dir = std::filesystem::temp_directory_path() / "bnshap_cli_test";
    std::filesystem::create_directories(dir);
    const auto cfg = dir / "sim.json";
    std::ofstream(cfg) << R"({"n_networks": 5, "seed": 3, "n_vars": 5})";
    const json a = runJson("simulate " + cfg.string());
    CHECK(a["seed"] == 3);
    CHECK(a["payload"] == runJson("simulate " + cfg.string())["payload"]);
    CHECK(run("simulate " + cfg.string()).code == 0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("exit codes") {
    CHECK(run("--help").code == 0);
    CHECK(run("shapley /nonexistent/model.json").code == 2);
    CHECK(run("shapley").code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("shapley " + model("sibling_gaussian.json") + " --mc 0").code == 2);

    const auto dir = std::filesystem::temp_directory_path() / "bnshap_cli_codes";
    std::filesystem::create_directories(dir);
    const auto bad = dir / "bad.json";
    std::ofstream(bad) << "{\n  \"type\": \"gaussian\",\n  oops\n}\n";
    const Run syntax = run("shapley " + bad.string(), true);
    CHECK(syntax.code == 2);
    CHECK(syntax.out.find("line 3") != std::string::npos);

    json big = {{"type", "gaussian"}, {"target", "T"}, {"variables", json::array()}, {"noise_variance", json::object()}};
    for (int i = 0; i < 27; ++i) {
        const std::string name = i == 0 ? "T" : "X" + std::to_string(i);
        big["variables"].push_back(name);
        big["noise_variance"][name] = 1.0;
    }
    const auto large = dir / "large.json";
    std::ofstream(large) << big.dump();
    CHECK(run("shapley " + large.string()).code == 3);
    std::filesystem::remove_all(dir);
}
