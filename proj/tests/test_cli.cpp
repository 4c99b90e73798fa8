//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file test_cli.cpp
//---------------------------------------------------------------------------//
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <catch_amalgamated.hpp>

using Catch::Matchers::ContainsSubstring;

namespace
{
namespace fs = std::filesystem;

struct Outcome
{
    int code;
    std::string out;
};

Outcome run(std::string const& args, std::string const& env = "")
{
    std::string const cmd = env + " " + PERPSIM_CLI_PATH + " " + args
                            + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, p))
        out.append(buf, n);
    int const status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string write_config(std::string const& name, std::string const& text)
{
    auto const path = fs::temp_directory_path() / ("perpsim_cli_" + name);
    std::ofstream(path) << text;
    return path.string();
}

std::string slurp(std::string const& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
}  // namespace

TEST_CASE("exit codes")
{
    CHECK(run("run --config " + write_config("bad", "delta=2\n")).code == 2);
    CHECK(run("run --config /nonexistent.conf").code == 2);
    CHECK(run("frobnicate").code == 2);
    auto const refused = run(
        "run --config "
        + write_config("ref", "model=two_state\nestimator=sd\ndelta=0.01\n"
                              "reps=10\n"));
    CHECK(refused.code == 3);
    CHECK_THAT(refused.out, ContainsSubstring("largest admissible delta"));
    CHECK(run("theta-star --config "
              + write_config("noroot", "model=normal\nmean=1\ndelta=0.1\n"
                                       "reps=1\n"))
              .code
          == 4);
    CHECK(run("slope --config "
              + write_config("two", "deltas=0.1,0.01\nreps=10\n"))
              .code
          == 2);
}

TEST_CASE("run writes csv and metadata")
{
    auto const cfg = write_config("ok", "model=arch1\nestimator=si\n"
                                        "delta=0.1\nreps=3000\nseed=4\n");
    auto const out = (fs::temp_directory_path() / "perpsim_cli_ok.csv").string();
    auto const r = run("run --config " + cfg + " --workers 2 --no-timing --out "
                       + out);
    REQUIRE(r.code == 0);
    auto const csv = slurp(out);
    CHECK(csv.rfind("scenario,model,estimator,delta,reps,estimate,std_err,cv,"
                    "ci_lo,ci_hi,mean_steps,max_steps,capped_count,seed,"
                    "wall_ms\n",
                    0)
          == 0);
    CHECK_THAT(slurp(out + ".meta.json"), ContainsSubstring("\"bias\""));

    // Environment seed override
    auto const a = run("run --config " + cfg + " --no-timing");
    auto const b = run("run --config " + cfg + " --no-timing",
                       "PERPSIM_SEED=123");
    CHECK(a.code == 0);
    CHECK_THAT(b.out, ContainsSubstring(",123,NA"));
    CHECK(a.out != b.out);
    CHECK(run("run --config " + cfg, "PERPSIM_SEED=abc").code == 2);
}

TEST_CASE("theta-star and verify-lyapunov")
{
    auto const cfg = write_config("ts", "model=two_state\nestimator=sd\n"
                                        "delta=1e-3\nreps=1\n"
                                        "enforce_budget=false\n");
    auto const t = run("theta-star --config " + cfg);
    CHECK(t.code == 0);
    CHECK_THAT(t.out, ContainsSubstring("1.6031"));
    auto const v = run("verify-lyapunov --config " + cfg + " --probes 2");
    CHECK(v.code == 0);
    CHECK_THAT(v.out, ContainsSubstring("scenario1,2,"));
}

TEST_CASE("shipped configurations parse")
{
    for (auto const& e : fs::directory_iterator(PERPSIM_CONFIG_DIR))
    {
        if (e.path().extension() != ".conf")
            continue;
        CAPTURE(e.path().string());
        CHECK(run("theta-star --config " + e.path().string()).code == 0);
    }
}

TEST_CASE("reproduce-appendix writes the grid")
{
    auto const dir = fs::temp_directory_path() / "perpsim_cli_appendix";
    fs::remove_all(dir);
    auto const r = run("reproduce-appendix --reps 20 --no-timing --out "
                       + dir.string());
    REQUIRE(r.code == 0);
    auto const csv = slurp((dir / "appendix.csv").string());
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 75);
    CHECK(fs::exists(dir / "appendix.conf"));
}
