#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

std::string binary() {
    const char* b = std::getenv("LVEXP_BIN");
    REQUIRE_MESSAGE(b != nullptr, "LVEXP_BIN must point at the CLI binary");
    return b;
}

RunResult run(const std::string& args) {
    std::string tmp = "cli_test_out.tmp";
    std::string cmd = binary() + " " + args + " > " + tmp + " 2> cli_test_err.tmp";
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    std::ifstream f(tmp);
    std::stringstream ss;
    ss << f.rdbuf();
    r.out = ss.str();
    return r;
}

}  // namespace

TEST_CASE("invalid alpha exits with code 2 and a diagnostic") {
    auto r = run("run_price --model exp --alpha 0");
    CHECK(r.exit_code == 2);
    std::ifstream err("cli_test_err.tmp");
    std::stringstream ss;
    ss << err.rdbuf();
    CHECK(ss.str().find("alpha") != std::string::npos);
}

TEST_CASE("unknown table ids 8 and 12 exit with code 2") {
    CHECK(run("run_table --id 8 --out cli_table.tmp").exit_code == 2);
    CHECK(run("run_table --id 12 --out cli_table.tmp").exit_code == 2);
    CHECK(run("run_table --id 16 --out cli_table.tmp").exit_code == 2);
}

TEST_CASE("eps = 0 run reports total equal to base") {
    auto r = run("run_price --model exp --alpha 0.1 --eps 0 --method closed");
    REQUIRE(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["price"]["total"].get<double>() ==
          doctest::Approx(j["price"]["base"].get<double>()).epsilon(1e-14));
}

TEST_CASE("JSON report carries the full schema") {
    auto r = run("run_price --model linear --coeffs 0.3,0.5 --method closed");
    REQUIRE(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    for (const char* k : {"model", "params", "mode", "method", "price", "runtime_ms"})
        CHECK_MESSAGE(j.contains(k), "missing key " << k);
    CHECK(j["model"] == "linear");
    CHECK(j["mode"] == "default");
    for (const char* k : {"base", "terms", "total"}) CHECK(j["price"].contains(k));
    CHECK(j["price"]["terms"].is_array());
    CHECK(!j.contains("estimate"));  // closed form has no estimator block
}

TEST_CASE("mc method adds an estimate block") {
    auto r = run("run_price --model exp --alpha 0.1 --method mc --paths 2000 --steps 32");
    REQUIRE(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    REQUIRE(j.contains("estimate"));
    for (const char* k : {"mean", "se", "n"}) CHECK(j["estimate"].contains(k));
    CHECK(j["estimate"]["n"].get<long long>() == 2000);
}

TEST_CASE("paper-literal flag switches the reported mode and the numbers") {
    auto rd = run("run_price --model exp --alpha 0.1 --method closed");
    auto rl = run("run_price --model exp --alpha 0.1 --method closed --paper-literal");
    REQUIRE(rd.exit_code == 0);
    REQUIRE(rl.exit_code == 0);
    auto jd = nlohmann::json::parse(rd.out), jl = nlohmann::json::parse(rl.out);
    CHECK(jl["mode"] == "paper-literal");
    CHECK(jd["price"]["total"].get<double>() != jl["price"]["total"].get<double>());
    CHECK(jd["price"]["base"].get<double>() ==
          doctest::Approx(jl["price"]["base"].get<double>()).epsilon(1e-15));
}

TEST_CASE("table output is round-trippable CSV with six data rows") {
    auto r = run("run_table --id 9 --out cli_table9.tmp --paths 2000 --steps 32");
    REQUIRE(r.exit_code == 0);
    std::ifstream f("cli_table9.tmp");
    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(f, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    REQUIRE(rows.size() == 7);  // header + 6 grid cells
    CHECK(rows[0][0] == "table_id");
    CHECK(rows[0].back() == "note");
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].size() >= rows[0].size() - 1);
    // paper column of the first row carries the published value
    CHECK(std::stod(rows[1][4]) == doctest::Approx(1.45057).epsilon(1e-6));
}

TEST_CASE("duplicated jump tables are flagged") {
    auto r = run("run_table --id 13 --out cli_table13.tmp --paths 1000 --steps 16");
    REQUIRE(r.exit_code == 0);
    std::ifstream f("cli_table13.tmp");
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str().find("duplication") != std::string::npos);
}

TEST_CASE("config file drives a run and flags override it") {
    {
        std::ofstream cfg("cli_config.tmp");
        cfg << R"({"model": "exp", "alpha": 0.1, "eps": 0.05, "s0": 95.0, "method": "closed"})";
    }
    auto r = run("run_price --config cli_config.tmp");
    REQUIRE(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["params"]["s0"].get<double>() == doctest::Approx(95.0));
    CHECK(j["params"]["eps"].get<double>() == doctest::Approx(0.05));
    auto r2 = run("run_price --config cli_config.tmp --s0 105");
    auto j2 = nlohmann::json::parse(r2.out);
    CHECK(j2["params"]["s0"].get<double>() == doctest::Approx(105.0));
}

TEST_CASE("order 2 is rejected outside the exponential closed form") {
    CHECK(run("run_price --model linear --coeffs 0.3,0.5 --order 2 --method closed").exit_code ==
          2);
    CHECK(run("run_price --model exp --alpha 0.1 --order 2 --method mc").exit_code == 2);
}

TEST_CASE("csv price format emits a header and one data row") {
    auto r = run("run_price --model exp --alpha 0.1 --format csv");
    REQUIRE(r.exit_code == 0);
    std::stringstream ss(r.out);
    std::string l1, l2;
    REQUIRE(std::getline(ss, l1));
    REQUIRE(std::getline(ss, l2));
    CHECK(l1.rfind("model,method,mode", 0) == 0);
    CHECK(l2.rfind("exp,closed,default", 0) == 0);
}
