#include "doctest.h"

#include "cli.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "pisotnorm");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = pisotnorm::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

json run_json(std::vector<std::string> args, int expect = 0) {
    args.push_back("--format");
    args.push_back("json");
    Run r = run(args);
    REQUIRE_MESSAGE(r.code == expect, r.err);
    return json::parse(r.out);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("pisotnorm_cli_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("certify") {
    json j = run_json({"certify", "plastic"});
    CHECK(j["pisot"] == true);
    CHECK(j["degree"] == 3);
    CHECK(j["complex_pairs"] == 1);
    CHECK(j["discriminant"] == "-23");
    CHECK(j["conjugates"].size() == 2);

    j = run_json({"certify", "x^2-2"}, 2);
    CHECK(j["pisot"] == false);
    CHECK(run({"certify", "x^2-x-1"}).code == 0);
    CHECK(run({"certify", "2x^2-1"}).code == 2);
}

TEST_CASE("expansion of one") {
    json j = run_json({"expansion", "phi"});
    CHECK(j["d1"] == "11");
    CHECK(j["dstar"] == "(10)^omega");
    CHECK(j["m_zero"] == 1);
    j = run_json({"expansion", "x^3-x-1"});
    CHECK(j["d1"] == "10001");
    CHECK(j["m_zero"] == 4);
    j = run_json({"expansion", "10", "--orbit"});
    CHECK(j["dstar"] == "(9)^omega");
    CHECK(j["m_zero"] == 0);
    CHECK(j["orbit"].size() == 2);
}

TEST_CASE("words against fibonacci") {
    // golden mean shift: |L_n| = F_{n+2}
    std::vector<long> fib{1, 1};
    while (fib.size() < 20) fib.push_back(fib[fib.size() - 1] + fib[fib.size() - 2]);
    for (int n : {1, 5, 10, 17}) {
        json j = run_json({"words", "phi", "-n", std::to_string(n)});
        CHECK(j["count"] == std::to_string(fib[static_cast<std::size_t>(n) + 1]));
        CHECK(j["bounds_ok"] == true);
    }
    json j = run_json({"words", "phi", "-n", "4", "--list"});
    REQUIRE(j["words"].size() == 8);
    CHECK(j["words"][0]["word"] == "0000");
    CHECK(j["words"][7]["word"] == "1010");
}

TEST_CASE("cylinder and measure") {
    json j = run_json({"cylinder", "plastic", "10000100"});
    CHECK(j["bounds_ok"] == true);
    CHECK(j["order"] == 8);
    CHECK(run({"cylinder", "plastic", "11"}).code == 1);

    j = run_json({"measure", "tribonacci", "-k", "3"});
    CHECK(j["sum_is_one"] == true);
    j = run_json({"measure", "10", "--left", "1/4", "--right", "3/4"});
    CHECK(j["parry"]["exact"] == "1/2");
}

TEST_CASE("constants and census") {
    json j = run_json({"constants", "2", "--epsilon", "1/2", "--delta", "1/1024"});
    CHECK(j["bhs"]["k"] == "201");
    j = run_json({"census", "phi", "-n", "8", "10", "--epsilon", "1/3", "--jobs", "2"});
    REQUIRE(j["census"].size() == 2);
    CHECK(j["census"][0]["words"] == "55");
    CHECK(j["all_within_bounds"] == true);
    json one = run_json({"census", "phi", "-n", "8", "10", "--epsilon", "1/3"});
    CHECK(one["census"] == j["census"]);
    CHECK(run({"census", "10", "-n", "9", "--budget", "1000"}).code == 4);
}

TEST_CASE("inscribe") {
    json j = run_json({"inscribe", "plastic", "1/3", "1/2"});
    CHECK(j["bound_ok"] == true);
    CHECK(j["inside"] == true);
    CHECK(run({"inscribe", "phi", "1/2", "1/2"}).code == 1);
}

TEST_CASE("usage errors") {
    CHECK(run({}).code == 1);
    CHECK(run({"nonsense"}).code == 1);
    CHECK(run({"words", "phi"}).code == 1);
    CHECK(run({"expansion", "phi", "--format", "xml"}).code == 1);
    CHECK(run({"certify", "x^2-2", "--format", "csv"}).out.rfind("key,value,decimal\n", 0) == 0);
}

TEST_CASE("generate writes digits and a reproducible trace") {
    auto dir = scratch("gen");
    {
        std::ofstream(dir / "seed.json") << R"({"bases": ["phi", "plastic"], "mode": "scaled", "target_digits": 50})";
        std::ofstream(dir / "run.json") << R"({"profile": {"epsilon": "1/6", "k": 1, "n": 150}, "target_digits": 300})";
    }
    auto gen = [&](const std::string& out) {
        return run_json({"generate", (dir / "run.json").string(), "-o", (dir / out).string(), "--seed-config",
                         (dir / "seed.json").string()});
    };
    json a = gen("a");
    json b = gen("b");
    CHECK(a["complete"] == true);
    CHECK(a["steps_normal"] == true);
    REQUIRE(a["streams"].size() == 2);
    CHECK(a["streams"][0]["digits"].get<int>() >= 300);
    CHECK(slurp(dir / "a" / "trace.jsonl") == slurp(dir / "b" / "trace.jsonl"));
    std::string digits = slurp(a["streams"][0]["file"].get<std::string>());
    CHECK(digits == slurp(b["streams"][0]["file"].get<std::string>()));
    CHECK(digits.size() == a["streams"][0]["digits"].get<std::size_t>() + 1);

    json s = run_json({"analyze", a["streams"][0]["file"].get<std::string>(), "phi", "-n", "300"});
    REQUIRE(s["prefixes"].size() == 1);

    json c = run_json({"generate", (dir / "run.json").string(), "-o", (dir / "c").string(), "--seed-config",
                       (dir / "seed.json").string(), "--target", "1500"},
                      0);
    CHECK(c["complete"] == true);
}

TEST_CASE("generate stops on its step budget") {
    auto dir = scratch("budget");
    std::ofstream(dir / "bhs.json") << R"({"kind": "bhs", "target_digits": 2000, "max_steps": 2})";
    Run r = run({"generate", (dir / "bhs.json").string(), "-o", (dir / "o").string(), "--format", "json"});
    CHECK(r.code == 4);
    json j = json::parse(r.out);
    CHECK(j["steps"] == 2);
    CHECK(j["stop_reason"] == "max_steps reached");

    json s = run_json({"analyze", (dir / "o" / "digits_2.txt").string(), "2", "-n", "100"});
    CHECK(s["prefixes"][0]["simple_discrepancy"]["exact"] == "1/2");
    CHECK(s["prefixes"][0]["extreme_discrepancy"]["exact"] == "1");
}
