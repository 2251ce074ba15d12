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

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "rhobar/acceptance.hpp"
#include "rhobar/scenario.hpp"

namespace {

// Shown at the end of --help. The parser rejects unknown keys and keys that
// do not apply to the chosen scenario, so this list is the whole surface.
constexpr const char* kConfigReference = R"(Config files are flat key=value lines. '#' starts a comment. Unknown keys,
duplicate keys and keys that do not apply to the chosen scenario are errors.

Keys for every scenario (defaults in parentheses):
  scenario          two_level | two_atom_dfs | two_atom_bell | ion_heating | custom
  t_end             horizon in the scenario's natural time unit
                    (two_level 5, two_atom_dfs 10, two_atom_bell 8,
                     ion_heating 5, custom 1)
  n_steps           output intervals (100; ion_heating 180)
  substeps          integrator substeps per interval, 0 = automatic (0)
  oracle            on|off, also run the trajectory oracle (off)
  n_traj            oracle trajectories, at least 100 (10000)
  seed              oracle seed (1)
  oracle_substeps   oracle substeps per interval, 0 = automatic (0)
  workers           oracle worker threads, 0 = all cores (0)
  out_dir           output directory (.)

two_level (time unit: the correlation time)
  sigma2            frequency variance (1)
  corr_time         noise correlation time (1)

two_atom_dfs, two_atom_bell (time unit: 1/gamma)
  gamma             collective dephasing rate (1)

ion_heating (time unit: 1/omega0)
  omega0_T          field correlation time, units of 1/omega0 (0.2)
  omega0_tau1       heating time the coupling is tuned to, units of 1/omega0 (10)
  n_fock            oscillator levels kept, at least 3 (5)

custom (time unit: 1)
  energies          comma-separated level energies (required)
  psi0_re, psi0_im  comma-separated initial state amplitudes (required)
  kernel            exponential | white (exponential)
  sigma2, corr_time exponential kernel parameters (1, 1)
  strength          white kernel strength (1)
  mean              constant process mean (0)

Outputs: <out_dir>/timeseries.csv and <out_dir>/report.txt for simulate,
<out_dir>/truncation.csv for truncation-study. CSV values carry 17
significant digits. Exit codes: 0 pass, 1 config error, 2 run or check
failure.)";

int run_simulate(const std::string& config_path, const CLI::App& sim, const std::string& out_dir,
                 std::size_t workers, const std::string& oracle_flag) {
    rhobar::ScenarioConfig cfg = rhobar::parse_config_file(config_path);
    if (sim.count("--out") > 0) cfg.out_dir = out_dir;
    if (sim.count("--workers") > 0) cfg.workers = workers;
    if (sim.count("--oracle") > 0) cfg.oracle = (oracle_flag == "on");
    if (cfg.oracle && cfg.n_traj < 100)
        throw rhobar::ConfigError("config key 'n_traj': must be >= 100 when the oracle is on");

    const rhobar::ScenarioOutcome outcome = rhobar::run_scenario(cfg);
    std::fputs(outcome.report.c_str(), stdout);
    std::printf("wrote %s\nwrote %s\n", outcome.csv_path.c_str(), outcome.report_path.c_str());
    return outcome.passed ? 0 : 2;
}

int run_truncation(const std::string& config_path) {
    const rhobar::ScenarioConfig cfg = rhobar::parse_config_file(config_path);
    const rhobar::TruncationStudy study = rhobar::truncation_study(cfg);
    std::fputs(study.table.c_str(), stdout);
    std::printf("wrote %s\n", study.csv_path.c_str());
    return 0;
}

int run_self_test(std::size_t workers) {
    const auto results = rhobar::run_acceptance(workers);
    double total = 0.0;
    for (const auto& r : results) {
        std::printf("%s\n", rhobar::acceptance_line(r).c_str());
        total += r.seconds;
    }
    const bool ok = rhobar::acceptance_passed(results);
    std::printf("self-test: %s (total %.1f s)\n", ok ? "PASS" : "FAIL", total);
    return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ensemble-average dynamics of stochastically driven closed quantum systems"};
    app.require_subcommand(1);
    app.footer(kConfigReference);

    std::string sim_config, trunc_config, out_dir, oracle_flag;
    std::size_t sim_workers = 0, self_workers = 0;

    CLI::App* sim = app.add_subcommand(
        "simulate", "integrate a scenario and write timeseries.csv and report.txt");
    sim->add_option("config", sim_config, "scenario config file")->required();
    sim->add_option("--out", out_dir, "output directory (overrides out_dir in the config)");
    sim->add_option("--workers", sim_workers,
                    "oracle worker threads, 0 = all cores (overrides the config)");
    sim->add_option("--oracle", oracle_flag, "force the trajectory oracle on or off")
        ->check(CLI::IsMember({"on", "off"}));

    CLI::App* trunc = app.add_subcommand(
        "truncation-study", "rerun an ion_heating config at several ladder truncations");
    trunc->add_option("config", trunc_config, "ion_heating config file")->required();

    CLI::App* self = app.add_subcommand("self-test", "run the acceptance suite and report per-criterion results");
    self->add_option("--workers", self_workers, "oracle worker threads, 0 = all cores");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sim->parsed()) return run_simulate(sim_config, *sim, out_dir, sim_workers, oracle_flag);
        if (trunc->parsed()) return run_truncation(trunc_config);
        if (self->parsed()) return run_self_test(self_workers);
    } catch (const rhobar::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
