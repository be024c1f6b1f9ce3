#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doeblin/io.hpp"

namespace fs = std::filesystem;
using doeblin::io::json;

namespace {

struct Result {
    int code;
    std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + std::string(DOEBLIN_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) out += buf;
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("doeblin_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write(const std::string& name, const std::string& text) {
    const fs::path p = scratch() / name;
    std::ofstream(p) << text;
    return p.string();
}

const std::string kGad = R"({"kind":"gad","d_in":2,"d_out":2,"p":0.3,"eta":0.25})";
const std::string kPbr =
    R"({"kind":"cq","d_in":2,"d_out":2,"states":[[[1,0],[0,0]],[[0.5,0.5],[0.5,0.5]]]})";

}  // namespace

TEST_CASE("coefficient output") {
    const auto gad = write("gad.json", kGad);
    const auto r = run("coeff --channel " + gad + " --which alpha --format json");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["name"] == "alpha");
    CHECK(std::abs(j["value"].get<double>() - 0.25) < 1e-7);

    const auto pbr = write("pbr.json", kPbr);
    const auto t = run("coeff --channel " + pbr + " --tensor 2 --which alpha");
    REQUIRE(t.code == 0);
    CHECK(std::abs(json::parse(t.out)["value"].get<double>()) < 1e-7);

    const auto all = run("coeff --channel " + gad + " --which all");
    REQUIRE(all.code == 0);
    const json a = json::parse(all.out);
    for (const char* k : {"alpha", "alpha_wang", "alpha_plus", "ppt", "ppt_sym2", "reverse"}) CHECK(a.contains(k));
    CHECK(std::abs(a["reverse"]["value"].get<double>() - 0.75) < 1e-7);
}

TEST_CASE("bound and simulate subcommands") {
    const auto m = run("bound mixing --alpha 0.25 --delta 0.01");
    REQUIRE(m.code == 0);
    CHECK(json::parse(m.out)["value"] == 17.0);

    const auto f = run("bound fairness --gamma 0.1 --alpha 0.25");
    CHECK(std::abs(json::parse(f.out)["value"].get<double>() - 0.075) < 1e-12);

    const auto b = run("bound barren --alpha 0.1 --depth 20 --layer 1 --norm-o 1");
    CHECK(std::abs(json::parse(b.out)["value"].get<double>() - 0.5105) < 5e-5);

    const auto e = run("bound mitigation --alpha 0.25 --depth 10 --delta 0.1");
    CHECK(std::abs(json::parse(e.out)["value"].get<double>() - 14.21) < 5e-3);

    const auto gad = write("gad_h.json", kGad);
    const auto h = run("bound hypothesis --channel " + gad + " --rho '[1,0]' --sigma '[0,1]' --epsilon 0.05 --beta 0.5");
    REQUIRE(h.code == 0);
    const json hj = json::parse(h.out);
    CHECK(std::abs(hj["value"].get<double>() - 0.81) < 5e-3);
    CHECK(hj["extra"]["upper"] == 74.0);

    const auto g1 = write("gad_mix.json", R"({"kind":"gad","p":1,"eta":0.25})");
    const auto s1 = run("simulate mixing --channel " + g1 + " --delta 0.01 --samples 0 --seed 3");
    REQUIRE(s1.code == 0);
    CHECK(json::parse(s1.out)["empirical"]["measured"] == 4.0);

    const auto circuit = write("circuit.json", R"({
      "n_qudits": 1, "d": 2, "dim_R": 1,
      "observable": [[1,0],[0,-1]],
      "layers": [
        {"generators": [[[0,1],[1,0]]], "thetas": [0.2], "noise": {"kind":"gad","p":0.3,"eta":0.25}},
        {"generators": [[[0,[0,-1]],[[0,1],0]]], "thetas": [0.4], "noise": {"kind":"gad","p":0.3,"eta":0.25}}
      ]})");
    const auto grad = run("simulate gradient --circuit " + circuit + " --layer 1 --generator 1 --samples 10 --seed 2");
    REQUIRE(grad.code == 0);
    CHECK(json::parse(grad.out)["empirical"]["respected"] == true);
}

TEST_CASE("exclusion subcommand") {
    const auto ens = write("ens.json", R"({"priors":[0.5,0.5],"states":[[[1,0],[0,0]],[[0.5,0.5],[0.5,0.5]]]})");
    const auto r = run("exclusion --ensemble " + ens);
    REQUIRE(r.code == 0);
    CHECK(std::abs(json::parse(r.out)["value"].get<double>() - (1 - std::sqrt(0.5)) / 2) < 1e-7);
}

TEST_CASE("JSON output round-trips byte-identically") {
    const auto gad = write("gad_rt.json", kGad);
    const std::vector<std::string> invocations = {"coeff --channel " + gad + " --which all",
                                                  "contraction --channel " + gad,
                                                  "bound mixing --alpha 0.25 --delta 0.01",
                                                  "bound mixing --alpha 0 --delta 0.01"};
    for (const auto& args : invocations) {
        const auto r = run(args);
        REQUIRE(r.code == 0);
        std::string line = r.out;
        while (!line.empty() && line.back() == '\n') line.pop_back();
        CHECK(doeblin::io::dump(json::parse(line)) == line);
    }
}

TEST_CASE("seeded invocations are reproducible") {
    const auto ch = write("gad_seed.json", R"({"kind":"gad","p":0.8,"eta":0.3})");
    const std::string args = "simulate mixing --channel " + ch + " --delta 0.05 --samples 30 --seed 9";
    CHECK(run(args).out == run(args).out);
}

TEST_CASE("table format and logging") {
    const auto gad = write("gad_tab.json", kGad);
    const auto t = run("coeff --channel " + gad + " --which alpha --format table");
    REQUIRE(t.code == 0);
    CHECK(t.out.find("value") != std::string::npos);
    CHECK(t.out.find('{') == std::string::npos);
    const auto quiet = run("bound fairness --gamma 0.1 --alpha 0.25");
    const auto loud = run("bound fairness --gamma 0.1 --alpha 0.25", "DOEBLIN_LOG=debug");
    CHECK(quiet.out == loud.out);
}

TEST_CASE("exit-code contract") {
    CHECK(run("nonsense").code == 2);
    CHECK(run("coeff").code == 2);
    CHECK(run("coeff --channel /nonexistent/file.json").code == 2);
    const auto bad = write("bad.json", "{\"kind\": \"gad\", ");
    CHECK(run("coeff --channel " + bad).code == 2);
    const auto noncp = write("noncp.json", R"({"kind":"choi","d_in":2,"d_out":2,"choi":[[1,0,0,2],[0,0,0,0],[0,0,0,0],[2,0,0,1]]})");
    CHECK(run("coeff --channel " + noncp).code == 2);
    const auto ntp = write("ntp.json", R"({"kind":"kraus","kraus":[[[1,0],[0,0.5]]]})");
    CHECK(run("coeff --channel " + ntp).code == 2);
    const auto unk = write("unk.json", R"({"kind":"teleporter","d_in":2,"d_out":2})");
    CHECK(run("coeff --channel " + unk).code == 2);
    CHECK(run("bound mitigation --alpha 0.25 --depth 3 --delta 0.7").code == 2);
    const auto gad = write("gad_x.json", kGad);
    CHECK(run("coeff --channel " + gad + " --which bogus").code == 2);
    // starved interior-point iterations surface as a solver failure
    CHECK(run("--max-iter 1 coeff --channel " + gad + " --which alpha").code == 1);
    const auto id = write("id.json", R"({"kind":"kraus","kraus":[[[1,0],[0,1]]]})");
    CHECK(run("simulate mixing --channel " + id + " --delta 0.1").code == 2);
}
