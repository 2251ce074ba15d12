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

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rhobar/scenario.hpp"

using namespace rhobar;
using Catch::Matchers::ContainsSubstring;

namespace {

ScenarioConfig parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test.conf");
}

std::string out_dir_for(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("rhobar_test_" + name);
    std::filesystem::remove_all(dir);
    return dir.string();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) fields.push_back(item);
    return fields;
}

std::vector<std::string> csv_lines(const std::string& csv) {
    std::vector<std::string> lines;
    std::stringstream ss(csv);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing is strict about shape") {
    REQUIRE_THROWS_WITH(parse_text("sigma2 = 1\n"),
                        ContainsSubstring("missing required key 'scenario'"));
    REQUIRE_THROWS_WITH(parse_text("scenario = banana\n"),
                        ContainsSubstring("unknown scenario 'banana'"));
    REQUIRE_THROWS_WITH(parse_text("scenario = two_level\nthis is not a pair\n"),
                        ContainsSubstring("test.conf:2"));
    REQUIRE_THROWS_WITH(parse_text("scenario = two_level\nsigma2 = 1\nsigma2 = 2\n"),
                        ContainsSubstring("duplicate key 'sigma2'"));
    REQUIRE_THROWS_WITH(parse_text("scenario = two_level\nfroop = 3\n"),
                        ContainsSubstring("unknown key 'froop'"));
    REQUIRE_THROWS_WITH(parse_text("scenario = two_level\ngamma = 1\n"),
                        ContainsSubstring("does not apply to scenario 'two_level'"));
    REQUIRE_THROWS_WITH(parse_text("scenario = two_level\nsigma2 = fast\n"),
                        ContainsSubstring("sigma2"));
    REQUIRE_THROWS_WITH(parse_text("scenario = two_level\noracle = maybe\n"),
                        ContainsSubstring("expected 'on' or 'off'"));
    REQUIRE_THROWS_WITH(parse_text("scenario = two_level\nsigma2 =\n"),
                        ContainsSubstring("empty key or value"));
    REQUIRE_THROWS_AS(parse_config_file("/nonexistent/rhobar.conf"), ConfigError);
}

TEST_CASE("config parsing validates ranges per scenario") {
    REQUIRE_THROWS_WITH(parse_text("scenario = two_level\nsigma2 = -1\n"),
                        ContainsSubstring("sigma2"));
    REQUIRE_THROWS_WITH(parse_text("scenario = two_level\nn_steps = 0\n"),
                        ContainsSubstring("n_steps"));
    REQUIRE_THROWS_WITH(parse_text("scenario = two_level\nn_steps = 2000000\n"),
                        ContainsSubstring("n_steps"));
    REQUIRE_THROWS_WITH(parse_text("scenario = two_level\nt_end = -2\n"),
                        ContainsSubstring("t_end"));
    REQUIRE_THROWS_WITH(parse_text("scenario = two_atom_bell\ngamma = 0\n"),
                        ContainsSubstring("gamma"));
    REQUIRE_THROWS_WITH(parse_text("scenario = ion_heating\nn_fock = 2\n"),
                        ContainsSubstring("n_fock"));
    REQUIRE_THROWS_WITH(parse_text("scenario = ion_heating\nn_fock = 300\n"),
                        ContainsSubstring("n_fock"));
    REQUIRE_THROWS_WITH(parse_text("scenario = custom\npsi0_re = 1\n"),
                        ContainsSubstring("energies"));
    REQUIRE_THROWS_WITH(parse_text("scenario = custom\nenergies = 1,-1\n"),
                        ContainsSubstring("psi0"));
    REQUIRE_THROWS_WITH(
        parse_text("scenario = custom\nenergies = 1,-1\npsi0_re = 1,0,0\n"),
        ContainsSubstring("length"));
    REQUIRE_THROWS_WITH(
        parse_text("scenario = custom\nenergies = 1,-1\npsi0_re = 0,0\n"),
        ContainsSubstring("zero norm"));
    REQUIRE_THROWS_WITH(
        parse_text("scenario = custom\nenergies = 1,-1\npsi0_re = 1,0\nkernel = triangle\n"),
        ContainsSubstring("kernel"));
    REQUIRE_THROWS_WITH(
        parse_text("scenario = two_level\noracle = on\nn_traj = 50\n"),
        ContainsSubstring("n_traj"));
}

TEST_CASE("config defaults and comment handling") {
    const ScenarioConfig cfg = parse_text(
        "# a minimal run\n"
        "scenario = two_level  # trailing comment\n"
        "\n");
    REQUIRE(cfg.scenario == ScenarioKind::two_level);
    REQUIRE(cfg.sigma2 == 1.0);
    REQUIRE(cfg.corr_time == 1.0);
    REQUIRE(cfg.t_end == 5.0);
    REQUIRE(cfg.n_steps == 100);
    REQUIRE(cfg.substeps == 0);
    REQUIRE_FALSE(cfg.oracle);
    REQUIRE(cfg.n_traj == 10000);
    REQUIRE(cfg.seed == 1);
    REQUIRE(cfg.workers == 0);
    REQUIRE(cfg.out_dir == ".");

    REQUIRE(parse_text("scenario = two_atom_dfs\n").t_end == 10.0);
    REQUIRE(parse_text("scenario = two_atom_bell\n").t_end == 8.0);
    REQUIRE(parse_text("scenario = ion_heating\n").t_end == 5.0);
    REQUIRE(parse_text("scenario = ion_heating\n").n_steps == 180);
    REQUIRE(parse_text("scenario = custom\nenergies = 1\npsi0_re = 1\n").t_end == 1.0);

    const ScenarioConfig on = parse_text("scenario = two_level\noracle = on\nseed = 42\n");
    REQUIRE(on.oracle);
    REQUIRE(on.seed == 42);
}

TEST_CASE("scenario assembly") {
    SECTION("two level dephasing setup") {
        ScenarioConfig cfg = parse_text("scenario = two_level\ncorr_time = 2\n");
        const ScenarioSetup s = build_scenario(cfg);
        REQUIRE(s.time_label == "t_over_T");
        REQUIRE(s.grid.t_end == 10.0);  // 5 correlation times
        REQUIRE(s.time_unit == 2.0);
        REQUIRE(s.observable_names == std::vector<std::string>{"coh_01"});
        REQUIRE(s.rho0(0, 1).real() == Catch::Approx(0.5).margin(1e-15));
        REQUIRE(std::holds_alternative<SingleRealModel>(s.model));
        REQUIRE(s.analytic != nullptr);
        REQUIRE(s.observables(s.rho0)[0] == Catch::Approx(0.5).margin(1e-15));
    }

    SECTION("entangled pair setups differ only in the initial state") {
        const ScenarioSetup bell =
            build_scenario(parse_text("scenario = two_atom_bell\ngamma = 2\n"));
        REQUIRE(bell.grid.t_end == 4.0);  // 8 / gamma
        REQUIRE(bell.time_label == "gamma_t");
        REQUIRE(max_abs_diff(bell.rho0, bell_phi_plus()) == 0.0);
        REQUIRE(bell.observable_names.size() == 3);

        const ScenarioSetup dfs = build_scenario(parse_text("scenario = two_atom_dfs\n"));
        REQUIRE(max_abs_diff(dfs.rho0, bell_psi_plus()) == 0.0);
    }

    SECTION("ion setup fixes the coupling from the dimensionless groups") {
        const ScenarioSetup s = build_scenario(parse_text("scenario = ion_heating\n"));
        REQUIRE(s.ion_coupling == Catch::Approx(0.26).margin(1e-15));
        const auto* ion = std::get_if<IonModel>(&s.model);
        REQUIRE(ion != nullptr);
        REQUIRE(ion->omega0 == 1.0);
        REQUIRE(ion->n_fock == 5);
        REQUIRE(ion->field_kernel.corr_time() == 0.2);
        REQUIRE(s.rho0(0, 0) == cplx(1.0, 0.0));
        REQUIRE(s.time_label == "omega0_t");

        ComplexMatrix diag = ComplexMatrix::zero(5, 5);
        diag(0, 0) = 0.2;
        diag(1, 1) = 0.3;
        diag(2, 2) = 0.5;
        const std::vector<double> obs = s.observables(diag);
        REQUIRE(obs[0] == Catch::Approx(0.2).margin(1e-15));
        REQUIRE(obs[1] == Catch::Approx(1.3).margin(1e-15));
    }

    SECTION("custom setup builds the diagonal coupling") {
        const ScenarioSetup s = build_scenario(parse_text(
            "scenario = custom\nenergies = 1,-1\npsi0_re = 0.8,0\npsi0_im = 0,0.6\n"));
        const auto* m = std::get_if<SingleRealModel>(&s.model);
        REQUIRE(m != nullptr);
        REQUIRE(m->op(0, 0) == cplx(1.0, 0.0));
        REQUIRE(m->op(1, 1) == cplx(-1.0, 0.0));
        REQUIRE(s.rho0(0, 0).real() == Catch::Approx(0.64).margin(1e-15));
        REQUIRE(s.rho0(1, 1).real() == Catch::Approx(0.36).margin(1e-15));
        REQUIRE(s.time_label == "t");
    }
}

TEST_CASE("two level scenario end to end") {
    ScenarioConfig cfg = parse_text("scenario = two_level\n");
    cfg.out_dir = out_dir_for("two_level");
    const ScenarioOutcome out = run_scenario(cfg);

    REQUIRE(out.passed);
    REQUIRE_THAT(out.report, ContainsSubstring("scenario: two_level"));
    REQUIRE_THAT(out.report, ContainsSubstring("oracle: off"));
    REQUIRE_THAT(out.report, ContainsSubstring("analytic reference: exact dephasing solution"));
    REQUIRE_THAT(out.report, ContainsSubstring("overall: PASS"));
    for (const CheckLine& c : out.checks) REQUIRE(c.passed);

    const std::vector<std::string> lines = csv_lines(out.csv);
    REQUIRE(lines.size() == 102);  // header + 101 grid points
    REQUIRE(lines[0] ==
            "t_over_T,re_00,im_00,re_01,im_01,re_10,im_10,re_11,im_11,coh_01");
    const std::vector<std::string> first = split_csv_line(lines[1]);
    REQUIRE(first[0] == "0");
    REQUIRE(first[1] == "0.5");
    REQUIRE(first[3] == "0.5");

    SECTION("every numeric field round-trips at 17 significant digits") {
        for (const std::string& field : split_csv_line(lines[51]))
            REQUIRE(fmt17(std::stod(field)) == field);
    }

    SECTION("the files on disk are the returned strings") {
        REQUIRE(read_file(out.csv_path) == out.csv);
        REQUIRE(read_file(out.report_path) == out.report);
    }

    SECTION("reruns are byte identical") {
        ScenarioConfig again = cfg;
        again.out_dir = out_dir_for("two_level_again");
        const ScenarioOutcome second = run_scenario(again);
        REQUIRE(second.csv == out.csv);
        REQUIRE(second.report == out.report);
    }
}

TEST_CASE("decoherence free subspace scenario stays put") {
    ScenarioConfig cfg = parse_text("scenario = two_atom_dfs\nn_steps = 50\n");
    cfg.out_dir = out_dir_for("dfs");
    const ScenarioOutcome out = run_scenario(cfg);
    REQUIRE(out.passed);
    REQUIRE_THAT(out.report, ContainsSubstring("stationary: yes"));
    REQUIRE_THAT(out.report, ContainsSubstring("stationarity deviation"));
}

TEST_CASE("bell decoherence scenario hits the closed forms") {
    ScenarioConfig cfg = parse_text("scenario = two_atom_bell\nn_steps = 16\n");
    cfg.out_dir = out_dir_for("bell");
    const ScenarioOutcome out = run_scenario(cfg);
    REQUIRE(out.passed);

    bool saw_final_concurrence = false;
    for (const CheckLine& c : out.checks) {
        REQUIRE(c.passed);
        if (c.name == "final concurrence") saw_final_concurrence = true;
    }
    REQUIRE(saw_final_concurrence);

    // at gamma t = 1 the outer coherence is e^-1 / 2 and the concurrence e^-1
    const std::vector<std::string> lines = csv_lines(out.csv);
    const std::vector<std::string> header = split_csv_line(lines[0]);
    REQUIRE(header[0] == "gamma_t");
    REQUIRE(header[33] == "coh_0011");
    REQUIRE(header[35] == "concurrence");
    bool found = false;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const std::vector<std::string> row = split_csv_line(lines[k]);
        if (row[0] != "1") continue;
        found = true;
        REQUIRE(std::stod(row[33]) == Catch::Approx(0.18393972058572117).margin(1e-7));
        REQUIRE(std::stod(row[35]) == Catch::Approx(0.36787944117144233).margin(1e-6));
    }
    REQUIRE(found);
}

TEST_CASE("ion heating scenario verifies the short-time law") {
    SECTION("broadband field with the default grid") {
        ScenarioConfig cfg = parse_text("scenario = ion_heating\n");
        cfg.out_dir = out_dir_for("ion");
        const ScenarioOutcome out = run_scenario(cfg);
        REQUIRE(out.passed);
        REQUIRE_THAT(out.report, ContainsSubstring("short-time t^2 law relative error"));
        REQUIRE_THAT(out.report, ContainsSubstring("grid points qualify"));
        REQUIRE_THAT(out.report, ContainsSubstring("transient negativity allowed"));
        REQUIRE_THAT(out.report, ContainsSubstring("analytic reference: none"));
        REQUIRE(csv_lines(out.csv)[0].find("ground_fidelity,mean_n") != std::string::npos);
    }

    SECTION("resonant field keeps several samples inside the window") {
        ScenarioConfig cfg = parse_text("scenario = ion_heating\nomega0_T = 1\nn_steps = 200\n");
        cfg.out_dir = out_dir_for("ion_resonant");
        const ScenarioOutcome out = run_scenario(cfg);
        REQUIRE(out.passed);
        REQUIRE_THAT(out.report, ContainsSubstring("2 grid points qualify"));
    }

    // For a broadband field the quadratic law holds only while t is small
    // against the field correlation time. A grid whose first sample lands at
    // the far edge of the window sees the cubic correction exceed the 5%
    // tolerance, and the run must say so rather than average it away.
    SECTION("edge sampling of a broadband field fails the check") {
        ScenarioConfig cfg = parse_text("scenario = ion_heating\nn_steps = 100\n");
        cfg.out_dir = out_dir_for("ion_edge");
        const ScenarioOutcome out = run_scenario(cfg);
        REQUIRE_FALSE(out.passed);
        bool law_failed = false;
        for (const auto& c : out.checks)
            if (c.name == "short-time t^2 law relative error" && !c.passed) law_failed = true;
        REQUIRE(law_failed);
        REQUIRE_THAT(out.report, ContainsSubstring("overall: FAIL"));
    }
}

TEST_CASE("custom scenario with a mean drive") {
    ScenarioConfig cfg = parse_text(
        "scenario = custom\n"
        "energies = 1,-1\n"
        "psi0_re = 0.8,0.6\n"
        "mean = 0.5\n"
        "t_end = 2\n"
        "n_steps = 40\n");
    cfg.out_dir = out_dir_for("custom");
    const ScenarioOutcome out = run_scenario(cfg);
    REQUIRE(out.passed);
    REQUIRE_THAT(out.report, ContainsSubstring("scenario: custom"));
    REQUIRE_THAT(out.report, ContainsSubstring("max element deviation vs analytic"));
}

TEST_CASE("oracle cross-check runs inside the scenario") {
    ScenarioConfig cfg = parse_text(
        "scenario = two_level\n"
        "t_end = 2\n"
        "n_steps = 20\n"
        "oracle = on\n"
        "n_traj = 2000\n"
        "workers = 1\n"
        "seed = 7\n");
    cfg.out_dir = out_dir_for("oracle");
    const ScenarioOutcome out = run_scenario(cfg);
    REQUIRE(out.passed);
    REQUIRE_THAT(out.report, ContainsSubstring("oracle: n_traj = 2000, seed = 7"));
    REQUIRE_THAT(out.report, ContainsSubstring("max |z|"));

    bool saw_z = false, saw_frac = false;
    for (const CheckLine& c : out.checks) {
        if (c.name == "oracle max |z|") saw_z = c.passed;
        if (c.name == "oracle fraction within 3 SE") saw_frac = c.passed;
    }
    REQUIRE(saw_z);
    REQUIRE(saw_frac);

    const std::vector<std::string> header = split_csv_line(csv_lines(out.csv)[0]);
    REQUIRE(header.back() == "se_im_11");
    REQUIRE(std::count(header.begin(), header.end(), "mc_re_01") == 1);
}

TEST_CASE("an unresolved grid fails the scenario instead of passing quietly") {
    ScenarioConfig cfg = parse_text("scenario = two_level\nn_steps = 5\nsubsteps = 1\n");
    cfg.out_dir = out_dir_for("coarse");
    const ScenarioOutcome out = run_scenario(cfg);
    REQUIRE_FALSE(out.passed);
    REQUIRE_THAT(out.report, ContainsSubstring("overall: FAIL"));
    bool analytic_failed = false;
    for (const CheckLine& c : out.checks)
        if (c.name == "max element deviation vs analytic" && !c.passed) analytic_failed = true;
    REQUIRE(analytic_failed);
}

TEST_CASE("truncation study") {
    SECTION("requires the ion scenario") {
        REQUIRE_THROWS_WITH(truncation_study(parse_text("scenario = two_level\n")),
                            ContainsSubstring("ion_heating"));
    }

    SECTION("weak coupling is converged already at the smallest ladder") {
        ScenarioConfig cfg = parse_text(
            "scenario = ion_heating\nomega0_tau1 = 1e12\nt_end = 2\nn_steps = 8\n");
        cfg.out_dir = out_dir_for("trunc_weak");
        const TruncationStudy study = truncation_study(cfg);
        REQUIRE(study.n_fock_values == std::vector<std::size_t>{3, 5, 8, 12});
        REQUIRE(study.checkpoint_times == std::vector<double>{0.5, 1.0, 1.5, 2.0});
        for (std::size_t c = 0; c < study.checkpoint_times.size(); ++c)
            for (std::size_t ni = 0; ni + 1 < study.n_fock_values.size(); ++ni)
                REQUIRE(std::abs(study.ground_pop[ni + 1][c] - study.ground_pop[ni][c]) <=
                        1e-10);
        REQUIRE_THAT(study.table, ContainsSubstring("n_fock=12"));
        REQUIRE(csv_lines(study.csv)[0] ==
                "omega0_t,rho00_nfock3,rho00_nfock5,rho00_nfock8,rho00_nfock12,"
                "diff_3_5,diff_5_8,diff_8_12");
        REQUIRE(read_file(study.csv_path) == study.csv);
    }

    SECTION("strong coupling exposes the truncation at late times") {
        ScenarioConfig cfg = parse_text(
            "scenario = ion_heating\nomega0_tau1 = 2\nt_end = 15\nn_steps = 15\n");
        cfg.out_dir = out_dir_for("trunc_strong");
        const TruncationStudy study = truncation_study(cfg);
        const std::size_t last = study.checkpoint_times.size() - 1;
        const double d35 = std::abs(study.ground_pop[1][last] - study.ground_pop[0][last]);
        const double d812 = std::abs(study.ground_pop[3][last] - study.ground_pop[2][last]);
        REQUIRE(d35 > 1e-4);     // the 3-level ladder is visibly too small
        REQUIRE(d812 < d35);     // and growing the ladder converges
    }
}
