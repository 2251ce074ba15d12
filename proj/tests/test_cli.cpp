// Copyright 2026 The rhobar authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives the installed `rhobar` binary as a subprocess and checks the exit
// code contract: 0 on a passing run, 1 for configuration mistakes, 2 when the
// physics checks fail. RHOBAR_BIN is injected by the build.

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>

namespace {

namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(RHOBAR_BIN) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult r;
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
    const int status = pclose(pipe);
    REQUIRE(WIFEXITED(status));
    r.exit_code = WEXITSTATUS(status);
    return r;
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "rhobar_test_cli";
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = scratch_dir() / name;
    std::ofstream out(p);
    out << text;
    return p;
}

}  // namespace

TEST_CASE("help text documents the interface") {
    const CliResult r = run_cli("--help");
    REQUIRE(r.exit_code == 0);
    REQUIRE_THAT(r.output, ContainsSubstring("simulate"));
    REQUIRE_THAT(r.output, ContainsSubstring("truncation-study"));
    REQUIRE_THAT(r.output, ContainsSubstring("self-test"));
    // Defaults are promised in the help text, including the denser ion grid.
    REQUIRE_THAT(r.output, ContainsSubstring("n_steps"));
    REQUIRE_THAT(r.output, ContainsSubstring("(100; ion_heating 180)"));
    REQUIRE_THAT(r.output, ContainsSubstring("Exit codes: 0 pass, 1 config error"));
}

TEST_CASE("a subcommand is required") {
    const CliResult r = run_cli("");
    REQUIRE(r.exit_code == 1);
}

TEST_CASE("configuration mistakes exit with 1") {
    SECTION("missing file") {
        const CliResult r = run_cli("simulate /nonexistent/rhobar.conf");
        REQUIRE(r.exit_code == 1);
        REQUIRE_THAT(r.output, ContainsSubstring("config error:"));
    }

    SECTION("unknown key") {
        const fs::path cfg = write_config("bad_key.conf", "scenario = two_level\nfroop = 3\n");
        const CliResult r = run_cli("simulate '" + cfg.string() + "'");
        REQUIRE(r.exit_code == 1);
        REQUIRE_THAT(r.output, ContainsSubstring("froop"));
    }

    SECTION("oracle forced on with too few trajectories") {
        const fs::path cfg = write_config("thin_oracle.conf",
                                          "scenario = two_level\nt_end = 1\nn_traj = 50\n");
        const CliResult r = run_cli("simulate '" + cfg.string() + "' --oracle on");
        REQUIRE(r.exit_code == 1);
        REQUIRE_THAT(r.output, ContainsSubstring("n_traj"));
    }

    SECTION("bad oracle flag value") {
        const fs::path cfg = write_config("plain.conf", "scenario = two_level\n");
        const CliResult r = run_cli("simulate '" + cfg.string() + "' --oracle maybe");
        REQUIRE(r.exit_code == 1);
    }

    SECTION("truncation study needs the ion scenario") {
        const fs::path cfg = write_config("not_ion.conf", "scenario = two_level\n");
        const CliResult r = run_cli("truncation-study '" + cfg.string() + "'");
        REQUIRE(r.exit_code == 1);
        REQUIRE_THAT(r.output, ContainsSubstring("ion_heating"));
    }
}

TEST_CASE("passing simulate run exits 0 and writes its outputs") {
    const fs::path out = scratch_dir() / "ok";
    fs::remove_all(out);
    const fs::path cfg =
        write_config("ok.conf", "scenario = two_level\nt_end = 2\nn_steps = 20\n");
    const CliResult r = run_cli("simulate '" + cfg.string() + "' --out '" + out.string() + "'");
    REQUIRE(r.exit_code == 0);
    REQUIRE_THAT(r.output, ContainsSubstring("overall: PASS"));
    REQUIRE_THAT(r.output, ContainsSubstring("wrote "));
    REQUIRE(fs::exists(out / "timeseries.csv"));
    REQUIRE(fs::exists(out / "report.txt"));
}

TEST_CASE("failing physics checks exit with 2") {
    // One forced integrator substep on a coarse grid leaves a visible
    // integration error against the exact solution.
    const fs::path out = scratch_dir() / "coarse";
    const fs::path cfg = write_config(
        "coarse.conf", "scenario = two_level\nt_end = 5\nn_steps = 5\nsubsteps = 1\n");
    const CliResult r = run_cli("simulate '" + cfg.string() + "' --out '" + out.string() + "'");
    REQUIRE(r.exit_code == 2);
    REQUIRE_THAT(r.output, ContainsSubstring("overall: FAIL"));
}

TEST_CASE("truncation study runs from the command line") {
    const fs::path out = scratch_dir() / "trunc";
    fs::remove_all(out);
    const fs::path cfg = write_config(
        "trunc.conf",
        "scenario = ion_heating\nt_end = 2\nn_steps = 8\nout_dir = " + out.string() + "\n");
    const CliResult r = run_cli("truncation-study '" + cfg.string() + "'");
    REQUIRE(r.exit_code == 0);
    REQUIRE_THAT(r.output, ContainsSubstring("n_fock=12"));
    REQUIRE_THAT(r.output, ContainsSubstring("wrote "));
    REQUIRE(fs::exists(out / "truncation.csv"));
}
