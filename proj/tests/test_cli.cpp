#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "toda/cli.hpp"

using toda::cli::Json;

namespace {

Json config(const std::string& name)
{
    std::ifstream in(std::string(TODA_SOURCE_DIR) + "/tests/configs/" + name);
    return Json::parse(in);
}

const Json* residual(const Json& doc, const std::string& name)
{
    for (const auto& r : doc["residuals"])
        if (r["name"] == name) return &r;
    return nullptr;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int shell(const std::string& cmd)
{
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("check without coupling: every residual at rounding level")
{
    const auto res = toda::cli::run("check", config("check_open.json"));
    CHECK(res.exit_code == 0);
    REQUIRE(res.document["residuals"].size() > 5);
    for (const auto& r : res.document["residuals"]) {
        if (r["name"] == "nlie_grid_halving") continue;  // not computed without coupling
        CHECK_MESSAGE(r["value"].get<double>() < 1e-12, r["name"].get<std::string>());
    }
}

TEST_CASE("check suite passes for coupled chains")
{
    for (const char* f : {"check_n2.json", "check_n3.json"}) {
        const auto res = toda::cli::run("check", config(f));
        CHECK_MESSAGE(res.exit_code == 0, res.document.dump());
        for (const auto& r : res.document["residuals"]) CHECK_MESSAGE(r["pass"].get<bool>(), r.dump());
        CHECK(res.document["version"] == toda::cli::version());
        CHECK(res.document["config"] == config(f));
        CHECK(res.document["certificates"].contains("nlie"));
    }
}

TEST_CASE("quantize reports residuals below 1e-8")
{
    const auto res = toda::cli::run("quantize", config("quantize_n2.json"));
    REQUIRE(res.exit_code == 0);
    for (const char* n : {"quantization_F1", "quantization_F2", "momentum"}) {
        const Json* r = residual(res.document, n);
        REQUIRE(r != nullptr);
        CHECK((*r)["value"].get<double>() <= 1e-8);
    }
    CHECK(res.document["result"]["candidate"]["converged"] == true);
}

TEST_CASE("spectrum energy agrees with oracle-n2")
{
    const auto s = toda::cli::run("spectrum", config("spectrum_n2.json"));
    const auto o = toda::cli::run("oracle-n2", config("oracle_n2.json"));
    REQUIRE(s.exit_code == 0);
    REQUIRE(o.exit_code == 0);
    const double e = s.document["result"]["energy"].get<double>();
    const double ref = o.document["result"]["energies"][0].get<double>();
    CHECK(std::abs(e - ref) / ref < 1e-5);
}

TEST_CASE("validation failures exit with 2 and name the field")
{
    auto res = toda::cli::run("quantize", config("bad_kappa.json"));
    CHECK(res.exit_code == 2);
    CHECK(res.document["error"].get<std::string>().find("config.model") != std::string::npos);
    CHECK(res.document["error"].get<std::string>().find("kappa") != std::string::npos);

    Json c = config("quantize_n2.json");
    c["model"]["mass"] = 1;
    res = toda::cli::run("quantize", c);
    CHECK(res.exit_code == 2);
    CHECK(res.document["error"].get<std::string>().find("config.model.mass") != std::string::npos);

    res = toda::cli::run("nlie", config("quantize_n2.json"));
    CHECK(res.exit_code == 2);  // mode mismatch
    res = toda::cli::run("banana", Json::object());
    CHECK(res.exit_code == 2);

    c = config("check_n2.json");
    c["tau"] = Json::array({Json::array({0.1, 0.7}), Json::array({0.1, -0.7})});
    res = toda::cli::run("check", c);
    CHECK(res.exit_code == 2);
}

TEST_CASE("structural failure maps to exit 4")
{
    Json c = config("check_n2.json");
    c["tau"] = Json::array({0.5, -0.5});
    const auto res = toda::cli::run("check", c);
    CHECK(res.exit_code == 4);
}

TEST_CASE("non-convergence maps to exit 3")
{
    Json c = config("quantize_n2.json");
    c["numerics"] = {{"max_iter", 0}};
    const auto res = toda::cli::run("quantize", c);
    CHECK(res.exit_code == 3);
}

TEST_CASE("results are deterministic")
{
    const auto a = toda::cli::run("nlie", config("nlie_n2.json"));
    const auto b = toda::cli::run("nlie", config("nlie_n2.json"));
    CHECK(a.exit_code == 0);
    CHECK(a.document.dump() == b.document.dump());
    CHECK(a.csv == b.csv);
}

TEST_CASE("binary: exit codes, output file and CSV")
{
    const char* bin = std::getenv("TODA_TBA");
    if (!bin) return;
    const std::string dir = TODA_SOURCE_DIR;
    const std::string out = "cli_test_out.json", csv = "cli_test_out.csv";
    CHECK(shell(std::string(bin) + " nlie --config " + dir + "/tests/configs/nlie_n2.json --out " + out + " --csv " +
                csv) == 0);
    const Json doc = Json::parse(slurp(out));
    CHECK(doc["status"] == "ok");
    const std::string text = slurp(csv);
    CHECK(text.rfind("lambda,ln_y\n", 0) == 0);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.back() == '\n');
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
        CHECK(line.find(',') != std::string::npos);
        ++rows;
    }
    CHECK(rows == doc["result"]["lambda"].size());
    // 17 significant digits survive the round trip
    const double first = std::stod(text.substr(text.find('\n') + 1));
    CHECK(first == doc["result"]["lambda"][0].get<double>());

    CHECK(shell(std::string(bin) + " quantize --config " + dir + "/tests/configs/bad_kappa.json --out " + out +
                " 2>/dev/null") == 2);
    CHECK(shell(std::string(bin) + " quantize 2>/dev/null >/dev/null") == 2);
    std::remove(out.c_str());
    std::remove(csv.c_str());
}
