#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rram/cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kOut = "cli_test_out";

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run rramsim(std::vector<std::string> args) {
    args.insert(args.begin(), "rramsim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = rram::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("gate correctness summaries are byte-identical across runs and job counts") {
    fs::remove_all(kOut);
    const Run a = rramsim({"gate", "IMPLY", "correctness", "--trials", "1000", "--seed", "7", "--out", kOut, "--label", "a"});
    const Run b = rramsim({"gate", "IMPLY", "correctness", "--trials", "1000", "--seed", "7", "--out", kOut, "--label", "b",
                           "--jobs", "3"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    const fs::path dir = kOut / "gate-IMPLY-correctness";
    CHECK(slurp(dir / "a" / "summary.json") == slurp(dir / "b" / "summary.json"));
    CHECK(slurp(dir / "a" / "trials.csv") == slurp(dir / "b" / "trials.csv"));

    const json s = json::parse(slurp(dir / "a" / "summary.json"));
    CHECK(s["trials"] == 1000);
    CHECK(s["p_correct"]["11"] == 1.0);
    const std::string trials = slurp(dir / "a" / "trials.csv");
    CHECK(trials.rfind("trial,input,verdict,final_state,flip_time\n", 0) == 0);
    CHECK(fs::exists(dir / "a" / "hist_final_state_00.csv"));

    const json m = json::parse(slurp(dir / "a" / "manifest.json"));
    CHECK(m["config"]["seed"] == 7);
    CHECK(m["config"]["preset"] == "believer-default");
}

TEST_CASE("leakage experiment reports the leakage time constant") {
    const Run r = rramsim({"experiment", "leakage", "--seed", "1", "--out", kOut, "--label", "tau"});
    REQUIRE(r.code == 0);
    const json s = json::parse(slurp(kOut / "experiment-leakage" / "tau" / "summary.json"));
    CHECK_THAT(s["fitted_tau"].get<double>(), Catch::Matchers::WithinRel(10.3, 0.05));
    CHECK(fs::exists(kOut / "experiment-leakage" / "tau" / "probes.csv"));
}

TEST_CASE("MAGIC stable-time reports immunity") {
    const Run r = rramsim({"gate", "MAGIC", "stable-time", "--trials", "8", "--seed", "3", "--out", kOut, "--label", "m"});
    REQUIRE(r.code == 0);
    const json s = json::parse(slurp(kOut / "gate-MAGIC_NOR-stable-time" / "m" / "summary.json"));
    CHECK(s["immune"] == true);
    CHECK(s["total_flips"] == 0);
}

TEST_CASE("other experiments and the device command write their files") {
    REQUIRE(rramsim({"experiment", "ron-roff", "--trials", "5", "--out", kOut, "--label", "e"}).code == 0);
    CHECK(fs::exists(kOut / "experiment-ron-roff" / "e" / "hist_roff.csv"));
    REQUIRE(rramsim({"experiment", "dynamics", "--trials", "4", "--out", kOut, "--label", "e"}).code == 0);
    CHECK(fs::exists(kOut / "experiment-dynamics" / "e" / "staircase.csv"));
    REQUIRE(rramsim({"experiment", "thresholds", "--out", kOut, "--label", "e"}).code == 0);
    const json t = json::parse(slurp(kOut / "experiment-thresholds" / "e" / "summary.json"));
    CHECK(t["v_plus"].contains("detected"));
    REQUIRE(rramsim({"device", "--out", kOut, "--label", "e"}).code == 0);
    CHECK(slurp(kOut / "device" / "e" / "trace.csv").rfind("t,node:p,dev:m0:v", 0) == 0);
}

TEST_CASE("config file and flag precedence") {
    fs::create_directories(kOut);
    const fs::path cfg = kOut / "cfg.json";
    std::ofstream(cfg) << R"({"seed": 11, "trials": 3, "label": "from-file"})";
    const Run r = rramsim({"gate", "TMSL", "correctness", "--config", cfg.string(), "--seed", "12", "--out", kOut});
    REQUIRE(r.code == 0);
    const json m = json::parse(slurp(kOut / "gate-TMSL_NOR-correctness" / "from-file" / "manifest.json"));
    CHECK(m["config"]["seed"] == 12);
    CHECK(m["config"]["trials"] == 3);
}

TEST_CASE("errors produce a machine-readable record and a nonzero exit") {
    fs::create_directories(kOut);
    const fs::path cfg = kOut / "bad.json";
    std::ofstream(cfg) << R"({"sed": 1})";
    const Run bad = rramsim({"gate", "IMPLY", "correctness", "--config", cfg.string()});
    CHECK(bad.code != 0);
    const json e = json::parse(bad.err);
    CHECK(e["error"]["kind"] == "config");

    const Run family = rramsim({"gate", "XOR", "correctness", "--out", kOut});
    CHECK(family.code != 0);
    CHECK(json::parse(family.err)["error"]["kind"] == "config");

    const Run usage = rramsim({"experiment", "forming"});
    CHECK(usage.code != 0);
    CHECK(json::parse(usage.err)["error"]["kind"] == "usage");

    CHECK(rramsim({"--help"}).code == 0);
}
