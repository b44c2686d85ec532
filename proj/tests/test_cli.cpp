#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "phasecert/cli.hpp"

using namespace phasecert;
namespace fs = std::filesystem;

namespace
{
fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("phasecert_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int invoke(std::vector<std::string> args, std::string* err_text = nullptr)
{
    std::vector<const char*> argv{"phasecert"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    if (err_text)
        *err_text = err.str();
    return code;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}
} // namespace

TEST_CASE("certify exit codes")
{
    const fs::path dir = scratch("certify");
    CHECK(invoke({"certify", "--param", "0.25", "--ball", "1", "--out", dir.string()}) == kExitOk);
    CHECK(fs::exists(dir / "certify.json"));
    CHECK(fs::exists(dir / "certify.manifest.json"));
    CHECK(invoke({"certify", "--param", "0.5", "--ball", "1", "--out", dir.string()}) == kExitRefusal);
    CHECK(invoke({"certify", "--param", "1.5", "--ball", "1", "--out", dir.string()}) == kExitError);
    CHECK(invoke({"nonsense"}) == kExitError);
}

TEST_CASE("config round trip and hash")
{
    RunConfig c;
    c.subcommand = "phi";
    c.params = {0.1, 0.2};
    c.ball = 2;
    c.seed = 7;
    const RunConfig back = config_from_json(to_json(c));
    CHECK(to_json(back).dump() == to_json(c).dump());
    CHECK(config_hash(back) == config_hash(c));
    CHECK(config_hash(back).size() == 64u);
    c.params = {0.1};
    CHECK(config_hash(back) != config_hash(c));
}

TEST_CASE("malformed and unknown config fields are rejected")
{
    const fs::path dir = scratch("config");
    {
        std::ofstream f(dir / "bad.json");
        f << R"({"subcommand": "phi", "params": [0.2], "bogus": 1})";
    }
    {
        std::ofstream f(dir / "broken.json");
        f << "{ not json";
    }
    std::string err;
    CHECK(invoke({"phi", "--config", (dir / "bad.json").string(), "--out", dir.string()}, &err) == kExitError);
    CHECK(err.find("bogus") != std::string::npos);
    CHECK(invoke({"phi", "--config", (dir / "broken.json").string(), "--out", dir.string()}) == kExitError);
}

TEST_CASE("flags override the config file")
{
    const fs::path dir = scratch("override");
    {
        std::ofstream f(dir / "c.json");
        f << R"({"params": [0.5], "ball": 1})";
    }
    CHECK(invoke({"certify", "--config", (dir / "c.json").string(), "--out", dir.string()}) == kExitRefusal);
    CHECK(invoke({"certify", "--config", (dir / "c.json").string(), "--param", "0.2", "--out", dir.string()}) ==
          kExitOk);
}

TEST_CASE("seeded simulation reruns are byte identical")
{
    const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
    for (const auto& dir : {a, b})
        REQUIRE(invoke({"simulate-perc", "--param", "0.4", "--n", "4", "--samples", "2000", "--seed", "11",
                        "--observable", "exit", "--out", dir.string()}) == kExitOk);
    const std::string csv = slurp(a / "simulate_perc.csv");
    CHECK(!csv.empty());
    CHECK(csv == slurp(b / "simulate_perc.csv"));
}

TEST_CASE("phi, best-bound and verify artifacts")
{
    const fs::path dir = scratch("artifacts");
    CHECK(invoke({"phi", "--param", "0.25", "--ball", "1", "--out", dir.string()}) == kExitOk);
    CHECK(slurp(dir / "phi.csv").find("0.75") != std::string::npos);
    CHECK(invoke({"best-bound", "--max-radius", "1", "--exact-only", "--out", dir.string()}) == kExitOk);
    CHECK(fs::exists(dir / "best_bound.csv"));
    CHECK(invoke({"verify", "--model", "ising", "--mode", "beta", "--check", "simon", "--out", dir.string()}) ==
          kExitOk);
    CHECK(fs::exists(dir / "verify.json"));
}

TEST_CASE("report merges manifests")
{
    const fs::path dir = scratch("report");
    CHECK(invoke({"report", "--out", dir.string()}) == kExitOk);
    REQUIRE(invoke({"phi", "--param", "0.3", "--ball", "0", "--out", dir.string()}) == kExitOk);
    CHECK(invoke({"report", "--input", (dir / "phi.manifest.json").string(), "--out", dir.string()}) == kExitOk);
    CHECK(fs::exists(dir / "report.csv"));
    fs::remove(dir / "phi.csv");
    CHECK(invoke({"report", "--input", (dir / "phi.manifest.json").string(), "--out", dir.string()}) ==
          kExitError);
}

TEST_CASE("installed binary honours the exit codes")
{
    const char* bin = std::getenv("PHASECERT_BIN");
    if (!bin)
        return;
    const fs::path dir = scratch("binary");
    const std::string base = std::string(bin) + " certify --ball 1 --out " + dir.string() + " --param ";
    const auto code = [](int status) { return WIFEXITED(status) ? WEXITSTATUS(status) : -1; };
    CHECK(code(std::system((base + "0.2 > /dev/null 2>&1").c_str())) == kExitOk);
    CHECK(code(std::system((base + "0.6 > /dev/null 2>&1").c_str())) == kExitRefusal);
    CHECK(code(std::system((base + "-1 > /dev/null 2>&1").c_str())) == kExitError);
}
