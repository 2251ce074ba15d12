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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rhobar/analytic.hpp"
#include "rhobar/density_matrix.hpp"
#include "rhobar/evolve.hpp"
#include "rhobar/hilbert.hpp"
#include "rhobar/monte_carlo.hpp"

namespace rhobar {

// Anything wrong with the user's configuration (bad file, bad key, bad
// value, unusable output directory). The command line maps this to exit
// code 1; physics/invariant failures map to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ScenarioKind { two_level, two_atom_dfs, two_atom_bell, ion_heating, custom };

inline std::string scenario_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::two_level: return "two_level";
        case ScenarioKind::two_atom_dfs: return "two_atom_dfs";
        case ScenarioKind::two_atom_bell: return "two_atom_bell";
        case ScenarioKind::ion_heating: return "ion_heating";
        case ScenarioKind::custom: return "custom";
    }
    return "?";
}

struct ScenarioConfig {
    ScenarioKind scenario = ScenarioKind::two_level;

    // two_level and custom: scalar process parameters
    double sigma2 = 1.0;     // mean-square amplitude
    double corr_time = 1.0;  // correlation time T
    double mean = 0.0;       // constant mean amplitude (custom only)
    double strength = 1.0;   // white-kernel weight (custom only)
    std::string kernel = "exponential";  // custom: exponential | white

    // two_atom scenarios
    double gamma = 1.0;  // Bell-corner decay rate; the collective noise unit

    // ion scenario, dimensionless groups
    double omega0_T = 0.2;
    double omega0_tau1 = 10.0;
    std::size_t n_fock = 5;

    // custom scenario model
    std::vector<double> energies;
    std::vector<cplx> psi0;

    // grid, in the scenario's natural time unit
    double t_end = 0.0;     // 0 means "use the scenario default"
    std::size_t n_steps = 0;  // 0 means "use the scenario default"
    std::size_t substeps = 0;  // integrator substeps per output step; 0 = auto

    // oracle
    bool oracle = false;
    std::size_t n_traj = 10000;
    std::uint64_t seed = 1;
    std::size_t oracle_substeps = 0;  // trajectory sub-sampling factor; 0 = auto
    std::size_t workers = 0;          // 0 = available parallelism

    std::string out_dir = ".";
};

inline double default_t_end(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::two_level: return 5.0;
        case ScenarioKind::two_atom_dfs: return 10.0;
        case ScenarioKind::two_atom_bell: return 8.0;
        case ScenarioKind::ion_heating: return 5.0;
        case ScenarioKind::custom: return 1.0;
    }
    return 1.0;
}

// The ion default is denser so that the first output step falls well inside
// the short-time validation window even for broadband fields (small omega0_T),
// where samples near the window edge pick up a visible cubic correction.
inline std::size_t default_n_steps(ScenarioKind k) {
    return k == ScenarioKind::ion_heating ? 180 : 100;
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double config_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number: '" + value + "'");
    }
}

inline std::uint64_t config_uint(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size() || v < 0) throw std::invalid_argument("");
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a non-negative integer: '" + value + "'");
    }
}

inline bool config_on_off(const std::string& key, const std::string& value) {
    if (value == "on") return true;
    if (value == "off") return false;
    throw ConfigError("config key '" + key + "': expected 'on' or 'off', got '" + value + "'");
}

inline std::vector<double> config_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError("config key '" + key + "': empty list element");
        out.push_back(config_double(key, item));
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

}  // namespace detail

// Strict flat key=value format: '#' starts a comment, keys may appear once,
// unknown keys and keys that do not apply to the chosen scenario are hard
// errors. This is deliberate: a silently ignored physics parameter is worse
// than a parse failure.
inline ScenarioConfig parse_config(std::istream& in, const std::string& source_name) {
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source_name + ":" + std::to_string(line_no) +
                              ": expected 'key = value', got '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(source_name + ":" + std::to_string(line_no) +
                              ": empty key or value");
        if (kv.count(key))
            throw ConfigError(source_name + ":" + std::to_string(line_no) + ": duplicate key '" +
                              key + "'");
        kv[key] = value;
    }

    static const std::set<std::string> kCommon = {"scenario", "t_end",   "n_steps",
                                                 "substeps", "oracle",  "n_traj",
                                                 "seed",     "oracle_substeps", "workers",
                                                 "out_dir"};
    static const std::map<std::string, std::set<std::string>> kPerScenario = {
        {"two_level", {"sigma2", "corr_time"}},
        {"two_atom_dfs", {"gamma"}},
        {"two_atom_bell", {"gamma"}},
        {"ion_heating", {"omega0_T", "omega0_tau1", "n_fock"}},
        {"custom",
         {"sigma2", "corr_time", "mean", "strength", "kernel", "energies", "psi0_re", "psi0_im"}},
    };

    const auto scen_it = kv.find("scenario");
    if (scen_it == kv.end()) throw ConfigError(source_name + ": missing required key 'scenario'");
    const std::string scen = scen_it->second;
    const auto allowed_it = kPerScenario.find(scen);
    if (allowed_it == kPerScenario.end())
        throw ConfigError("config key 'scenario': unknown scenario '" + scen +
                          "' (expected two_level, two_atom_dfs, two_atom_bell, ion_heating or "
                          "custom)");

    std::set<std::string> all_known = kCommon;
    for (const auto& [name, keys] : kPerScenario) {
        (void)name;
        all_known.insert(keys.begin(), keys.end());
    }
    for (const auto& [key, value] : kv) {
        (void)value;
        if (!all_known.count(key))
            throw ConfigError(source_name + ": unknown key '" + key + "'");
        if (!kCommon.count(key) && !allowed_it->second.count(key))
            throw ConfigError(source_name + ": key '" + key + "' does not apply to scenario '" +
                              scen + "'");
    }

    ScenarioConfig cfg;
    if (scen == "two_level") cfg.scenario = ScenarioKind::two_level;
    else if (scen == "two_atom_dfs") cfg.scenario = ScenarioKind::two_atom_dfs;
    else if (scen == "two_atom_bell") cfg.scenario = ScenarioKind::two_atom_bell;
    else if (scen == "ion_heating") cfg.scenario = ScenarioKind::ion_heating;
    else cfg.scenario = ScenarioKind::custom;

    const auto get = [&kv](const char* key) -> const std::string* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    if (const auto* v = get("sigma2")) cfg.sigma2 = detail::config_double("sigma2", *v);
    if (const auto* v = get("corr_time")) cfg.corr_time = detail::config_double("corr_time", *v);
    if (const auto* v = get("mean")) cfg.mean = detail::config_double("mean", *v);
    if (const auto* v = get("strength")) cfg.strength = detail::config_double("strength", *v);
    if (const auto* v = get("kernel")) cfg.kernel = *v;
    if (const auto* v = get("gamma")) cfg.gamma = detail::config_double("gamma", *v);
    if (const auto* v = get("omega0_T")) cfg.omega0_T = detail::config_double("omega0_T", *v);
    if (const auto* v = get("omega0_tau1"))
        cfg.omega0_tau1 = detail::config_double("omega0_tau1", *v);
    if (const auto* v = get("n_fock"))
        cfg.n_fock = static_cast<std::size_t>(detail::config_uint("n_fock", *v));
    if (const auto* v = get("energies")) cfg.energies = detail::config_list("energies", *v);
    if (const auto* v = get("t_end")) cfg.t_end = detail::config_double("t_end", *v);
    if (const auto* v = get("n_steps")) {
        cfg.n_steps = static_cast<std::size_t>(detail::config_uint("n_steps", *v));
        if (cfg.n_steps < 1) throw ConfigError("config key 'n_steps': must be >= 1");
    }
    if (const auto* v = get("substeps"))
        cfg.substeps = static_cast<std::size_t>(detail::config_uint("substeps", *v));
    if (const auto* v = get("oracle")) cfg.oracle = detail::config_on_off("oracle", *v);
    if (const auto* v = get("n_traj"))
        cfg.n_traj = static_cast<std::size_t>(detail::config_uint("n_traj", *v));
    if (const auto* v = get("seed")) cfg.seed = detail::config_uint("seed", *v);
    if (const auto* v = get("oracle_substeps"))
        cfg.oracle_substeps = static_cast<std::size_t>(detail::config_uint("oracle_substeps", *v));
    if (const auto* v = get("workers"))
        cfg.workers = static_cast<std::size_t>(detail::config_uint("workers", *v));
    if (const auto* v = get("out_dir")) cfg.out_dir = *v;

    {
        const auto* re = get("psi0_re");
        const auto* im = get("psi0_im");
        if (re || im) {
            const std::vector<double> vre =
                re ? detail::config_list("psi0_re", *re) : std::vector<double>{};
            const std::vector<double> vim =
                im ? detail::config_list("psi0_im", *im) : std::vector<double>{};
            const std::size_t n = std::max(vre.size(), vim.size());
            if ((re && im) && vre.size() != vim.size())
                throw ConfigError("config keys 'psi0_re'/'psi0_im': length mismatch");
            cfg.psi0.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                cfg.psi0[i] = cplx(i < vre.size() ? vre[i] : 0.0, i < vim.size() ? vim[i] : 0.0);
        }
    }

    // Range validation, itemized by field.
    if (cfg.t_end == 0.0) cfg.t_end = default_t_end(cfg.scenario);
    if (!(cfg.t_end > 0.0)) throw ConfigError("config key 't_end': must be > 0");
    if (cfg.n_steps == 0) cfg.n_steps = default_n_steps(cfg.scenario);
    if (cfg.n_steps > 1000000) throw ConfigError("config key 'n_steps': must be <= 1000000");
    switch (cfg.scenario) {
        case ScenarioKind::two_level:
            if (!(cfg.sigma2 > 0.0)) throw ConfigError("config key 'sigma2': must be > 0");
            if (!(cfg.corr_time > 0.0)) throw ConfigError("config key 'corr_time': must be > 0");
            break;
        case ScenarioKind::two_atom_dfs:
        case ScenarioKind::two_atom_bell:
            if (!(cfg.gamma > 0.0)) throw ConfigError("config key 'gamma': must be > 0");
            break;
        case ScenarioKind::ion_heating:
            if (!(cfg.omega0_T > 0.0)) throw ConfigError("config key 'omega0_T': must be > 0");
            if (!(cfg.omega0_tau1 > 0.0))
                throw ConfigError("config key 'omega0_tau1': must be > 0");
            if (cfg.n_fock < 3)
                throw ConfigError("config key 'n_fock': must be >= 3 for ion_heating");
            if (cfg.n_fock > 256)
                throw ConfigError("config key 'n_fock': must be <= 256");
            break;
        case ScenarioKind::custom: {
            if (cfg.energies.empty())
                throw ConfigError("config key 'energies': required for scenario 'custom'");
            if (cfg.psi0.empty())
                throw ConfigError("config keys 'psi0_re'/'psi0_im': required for scenario 'custom'");
            if (cfg.psi0.size() != cfg.energies.size())
                throw ConfigError("config key 'psi0_re': length must match 'energies'");
            double norm2 = 0.0;
            for (const cplx& c : cfg.psi0) norm2 += std::norm(c);
            if (!(norm2 > 0.0))
                throw ConfigError("config key 'psi0_re': state vector has zero norm");
            if (cfg.kernel != "exponential" && cfg.kernel != "white")
                throw ConfigError("config key 'kernel': expected 'exponential' or 'white', got '" +
                                  cfg.kernel + "'");
            if (cfg.kernel == "exponential") {
                if (!(cfg.sigma2 >= 0.0)) throw ConfigError("config key 'sigma2': must be >= 0");
                if (!(cfg.corr_time > 0.0))
                    throw ConfigError("config key 'corr_time': must be > 0");
            } else if (!(cfg.strength >= 0.0)) {
                throw ConfigError("config key 'strength': must be >= 0");
            }
            break;
        }
    }
    if (cfg.oracle && cfg.n_traj < 100)
        throw ConfigError("config key 'n_traj': must be >= 100 when the oracle is on");
    return cfg;
}

inline ScenarioConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

// Everything run_scenario needs, assembled from the parsed config: the
// model in internal units, the grid, the unit conversion back to the
// scenario's dimensionless time, observables and (where one exists) the
// closed-form reference.
struct ScenarioSetup {
    StochasticHamiltonianModel model;
    ComplexMatrix rho0;
    TimeGrid grid;            // internal time units
    double time_unit = 1.0;   // natural time = internal time / time_unit
    std::string time_label = "t";
    std::vector<std::string> observable_names;
    std::function<std::vector<double>(const ComplexMatrix&)> observables;
    std::function<ComplexMatrix(double)> analytic;  // internal time -> state; may be null
    double ion_coupling = 0.0;  // t^2-law coefficient (ion only)
};

inline ScenarioSetup build_scenario(const ScenarioConfig& cfg) {
    ScenarioSetup s;
    switch (cfg.scenario) {
        case ScenarioKind::two_level: {
            SingleRealModel m{pauli('z'),
                              GaussianProcessSpec::real_process(CorrelationKernel::exponential(
                                  cfg.sigma2, cfg.corr_time))};
            const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
            s.rho0 = pure_density({cplx(inv_sqrt2, 0.0), cplx(inv_sqrt2, 0.0)});
            s.grid = TimeGrid::of(0.0, cfg.t_end * cfg.corr_time, cfg.n_steps);
            s.time_unit = cfg.corr_time;
            s.time_label = "t_over_T";
            s.observable_names = {"coh_01"};
            s.observables = [](const ComplexMatrix& rho) {
                return std::vector<double>{std::abs(rho(0, 1))};
            };
            const SingleRealSolution sol = exact_single_real(m, 0.0);
            const ComplexMatrix rho0 = s.rho0;
            s.analytic = [sol, rho0](double t) { return sol.evolve(rho0, t); };
            s.model = m;
            break;
        }
        case ScenarioKind::two_atom_dfs:
        case ScenarioKind::two_atom_bell: {
            SingleRealModel m{two_qubit_z_total(),
                              GaussianProcessSpec::real_process(
                                  CorrelationKernel::white(cfg.gamma / 8.0))};
            s.rho0 = cfg.scenario == ScenarioKind::two_atom_dfs ? bell_psi_plus()
                                                                : bell_phi_plus();
            s.grid = TimeGrid::of(0.0, cfg.t_end / cfg.gamma, cfg.n_steps);
            s.time_unit = 1.0 / cfg.gamma;
            s.time_label = "gamma_t";
            s.observable_names = {"coh_0011", "coh_0110", "concurrence"};
            s.observables = [](const ComplexMatrix& rho) {
                return std::vector<double>{std::abs(rho(0, 3)), std::abs(rho(1, 2)),
                                           concurrence(rho)};
            };
            const SingleRealSolution sol = exact_single_real(m, 0.0);
            const ComplexMatrix rho0 = s.rho0;
            s.analytic = [sol, rho0](double t) { return sol.evolve(rho0, t); };
            s.model = m;
            break;
        }
        case ScenarioKind::ion_heating: {
            // Internal time unit is 1/omega0, so omega0 = 1 and the config's
            // dimensionless groups give the kernel and the coupling directly.
            const double T = cfg.omega0_T;
            const double coupling = (1.0 + T * T) / (2.0 * T * cfg.omega0_tau1);
            IonModel m{1.0, coupling, CorrelationKernel::exponential(1.0, T), cfg.n_fock};
            ComplexMatrix rho0 = ComplexMatrix::zero(cfg.n_fock, cfg.n_fock);
            rho0(0, 0) = 1.0;
            s.rho0 = rho0;
            s.grid = TimeGrid::of(0.0, cfg.t_end, cfg.n_steps);
            s.time_unit = 1.0;
            s.time_label = "omega0_t";
            s.observable_names = {"ground_fidelity", "mean_n"};
            s.observables = [](const ComplexMatrix& rho) {
                double n = 0.0;
                for (std::size_t k = 0; k < rho.rows(); ++k)
                    n += static_cast<double>(k) * rho(k, k).real();
                return std::vector<double>{rho(0, 0).real(), n};
            };
            s.ion_coupling = coupling;
            s.model = m;
            break;
        }
        case ScenarioKind::custom: {
            const std::size_t d = cfg.energies.size();
            ComplexMatrix op = ComplexMatrix::diagonal_real(cfg.energies);
            const CorrelationKernel kernel =
                cfg.kernel == "white"
                    ? CorrelationKernel::white(cfg.strength)
                    : CorrelationKernel::exponential(cfg.sigma2, cfg.corr_time);
            SingleRealModel m{op, GaussianProcessSpec::real_process(
                                      kernel, MeanFunction::constant(cfg.mean))};
            s.rho0 = pure_density(cfg.psi0);
            s.grid = TimeGrid::of(0.0, cfg.t_end, cfg.n_steps);
            s.time_unit = 1.0;
            s.time_label = "t";
            (void)d;
            const SingleRealSolution sol = exact_single_real(m, 0.0);
            const ComplexMatrix rho0 = s.rho0;
            s.analytic = [sol, rho0](double t) { return sol.evolve(rho0, t); };
            s.model = m;
            break;
        }
    }
    return s;
}

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file '" + path.string() + "'");
    out << content;
    if (!out) throw ConfigError("error while writing '" + path.string() + "'");
}

}  // namespace detail

struct CheckLine {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = true;
    bool applicable = true;
    std::string note;
};

struct ScenarioOutcome {
    bool passed = true;
    std::string report;
    std::string csv;
    std::filesystem::path csv_path;
    std::filesystem::path report_path;
    std::vector<CheckLine> checks;
};

namespace detail {

inline void append_element_columns(std::string& header, const std::string& prefix,
                                   std::size_t d) {
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            header += "," + prefix + "re_" + std::to_string(i) + std::to_string(j);
            header += "," + prefix + "im_" + std::to_string(i) + std::to_string(j);
        }
}

inline void append_element_values(std::string& row, const ComplexMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            row += "," + fmt17(m(i, j).real());
            row += "," + fmt17(m(i, j).imag());
        }
}

}  // namespace detail

inline std::string build_timeseries_csv(const ScenarioSetup& setup,
                                        const EvolutionResult& me,
                                        const EnsembleResult* ensemble) {
    const std::size_t d = setup.rho0.rows();
    std::string csv = setup.time_label;
    detail::append_element_columns(csv, "", d);
    for (const auto& name : setup.observable_names) csv += "," + name;
    if (ensemble) {
        detail::append_element_columns(csv, "mc_", d);
        detail::append_element_columns(csv, "se_", d);
    }
    csv += "\n";

    for (std::size_t k = 0; k < me.times.size(); ++k) {
        std::string row = detail::fmt17(me.times[k] / setup.time_unit);
        detail::append_element_values(row, me.states[k]);
        if (setup.observables)
            for (double obs : setup.observables(me.states[k])) row += "," + detail::fmt17(obs);
        if (ensemble) {
            detail::append_element_values(row, ensemble->mean_rho[k].matrix());
            detail::append_element_values(row, ensemble->std_error[k]);
        }
        csv += row + "\n";
    }
    return csv;
}

namespace detail {

inline void add_check(std::vector<CheckLine>& checks, std::string name, double value,
                      double tolerance, bool ok, std::string note = "") {
    checks.push_back({std::move(name), value, tolerance, ok, true, std::move(note)});
}

inline void add_na_check(std::vector<CheckLine>& checks, std::string name, std::string note) {
    checks.push_back({std::move(name), 0.0, 0.0, true, false, std::move(note)});
}

}  // namespace detail

// Runs the configured scenario end to end: integrate the master equation,
// optionally run the trajectory oracle, evaluate every applicable check,
// and write timeseries.csv plus report.txt into out_dir. Outputs are a
// pure function of the config (plus seed), with no timestamps or
// environment-dependent content.
inline ScenarioOutcome run_scenario(const ScenarioConfig& cfg) {
    const ScenarioSetup setup = build_scenario(cfg);
    const std::size_t d = setup.rho0.rows();

    EvolveOptions evolve_opts;
    evolve_opts.substeps = cfg.substeps;
    const EvolutionResult me = evolve_master_equation(setup.model, setup.rho0, setup.grid,
                                                      evolve_opts);

    EnsembleResult ensemble;
    const bool with_oracle = cfg.oracle;
    if (with_oracle) {
        EnsembleOptions opts;
        opts.n_trajectories = cfg.n_traj;
        opts.seed = cfg.seed;
        opts.workers = cfg.workers;
        if (cfg.oracle_substeps > 0) {
            opts.path_substeps = cfg.oracle_substeps;
            opts.unitary_substeps = cfg.oracle_substeps;
        }
        ensemble = ensemble_average(setup.model, setup.rho0, setup.grid, opts);
    }

    std::vector<CheckLine> checks;

    // Conservation-law drift directly measures integration quality.
    detail::add_check(checks, "trace drift", me.max_trace_drift, 1e-9,
                      me.max_trace_drift <= 1e-9);
    detail::add_check(checks, "hermiticity error", me.max_hermiticity_error, 1e-10,
                      me.max_hermiticity_error <= 1e-10);
    if (cfg.scenario == ScenarioKind::ion_heating) {
        // The averaged ion equation is not completely positive at finite
        // coupling; small transient dips are physical. Only a gross dip
        // (signalling truncation or step-size trouble) fails the run.
        detail::add_check(checks, "min eigenvalue (diagnostic)", me.min_eigenvalue, -1e-3,
                          me.min_eigenvalue >= -1e-3, "transient negativity allowed");
    } else {
        detail::add_check(checks, "min eigenvalue", me.min_eigenvalue, -1e-8,
                          me.min_eigenvalue >= -1e-8);
    }

    // Closed-form reference, where one exists.
    double analytic_max_dev = 0.0;
    double analytic_max_dev_t = 0.0;
    if (setup.analytic) {
        for (std::size_t k = 0; k < me.times.size(); ++k) {
            const double dev = max_abs_diff(me.states[k], setup.analytic(me.times[k]));
            if (dev > analytic_max_dev) {
                analytic_max_dev = dev;
                analytic_max_dev_t = me.times[k] / setup.time_unit;
            }
        }
    }

    const std::vector<double>& t = me.times;
    switch (cfg.scenario) {
        case ScenarioKind::two_level: {
            detail::add_check(checks, "max element deviation vs analytic", analytic_max_dev, 1e-6,
                              analytic_max_dev <= 1e-6);
            double rel = 0.0;
            double pop = 0.0;
            for (std::size_t k = 0; k < t.size(); ++k) {
                const ComplexMatrix ref = setup.analytic(t[k]);
                const double mag = std::abs(ref(0, 1));
                if (mag >= 1e-9)
                    rel = std::max(rel, std::abs(me.states[k](0, 1) - ref(0, 1)) / mag);
                pop = std::max({pop, std::abs(me.states[k](0, 0) - setup.rho0(0, 0)),
                                std::abs(me.states[k](1, 1) - setup.rho0(1, 1))});
            }
            detail::add_check(checks, "coherence relative error", rel, 1e-7, rel <= 1e-7);
            detail::add_check(checks, "population drift", pop, 1e-9, pop <= 1e-9);
            break;
        }
        case ScenarioKind::two_atom_dfs: {
            double dev = 0.0;
            for (const auto& state : me.states)
                dev = std::max(dev, max_abs_diff(state, setup.rho0));
            detail::add_check(checks, "stationarity deviation", dev, 1e-9, dev <= 1e-9);
            break;
        }
        case ScenarioKind::two_atom_bell: {
            detail::add_check(checks, "max element deviation vs analytic", analytic_max_dev, 1e-7,
                              analytic_max_dev <= 1e-7);
            double corner = 0.0;
            double conc = 0.0;
            double diag = 0.0;
            for (std::size_t k = 0; k < t.size(); ++k) {
                const double dt_nat = t[k] / setup.time_unit;
                corner = std::max(corner,
                                  std::abs(std::abs(me.states[k](0, 3)) -
                                           bell_corner_magnitude(1.0, dt_nat)));
                conc = std::max(conc, std::abs(concurrence(me.states[k]) -
                                               bell_concurrence(1.0, dt_nat)));
                for (std::size_t i = 0; i < 4; ++i)
                    diag = std::max(diag,
                                    std::abs(me.states[k](i, i) - setup.rho0(i, i)));
            }
            detail::add_check(checks, "corner decay vs half*exp(-gamma*t)", corner, 1e-7,
                              corner <= 1e-7);
            detail::add_check(checks, "concurrence vs exp(-gamma*t)", conc, 1e-6, conc <= 1e-6);
            detail::add_check(checks, "population drift", diag, 1e-9, diag <= 1e-9);
            if (t.back() / setup.time_unit >= 8.0 - 1e-9) {
                const double final_conc = concurrence(me.states.back());
                detail::add_check(checks, "final concurrence", final_conc, 1e-3,
                                  final_conc < 1e-3);
            }
            break;
        }
        case ScenarioKind::ion_heating: {
            const double T = cfg.omega0_T;
            const double window = 0.05 * std::min(1.0, 1.0 / T);
            double worst = 0.0;
            std::size_t used = 0;
            for (std::size_t k = 1; k < t.size(); ++k) {
                if (t[k] > window + 1e-12) break;
                const double predicted = setup.ion_coupling * t[k] * t[k];
                const double measured = 1.0 - me.states[k](0, 0).real();
                worst = std::max(worst, std::abs(measured - predicted) / predicted);
                ++used;
            }
            if (used > 0)
                detail::add_check(checks, "short-time t^2 law relative error", worst, 0.05,
                                  worst <= 0.05,
                                  std::to_string(used) + " grid points qualify");
            else
                detail::add_na_check(checks, "short-time t^2 law relative error",
                                     "no grid points inside the short-time window");
            break;
        }
        case ScenarioKind::custom: {
            detail::add_check(checks, "max element deviation vs analytic", analytic_max_dev, 1e-6,
                              analytic_max_dev <= 1e-6);
            break;
        }
    }

    DeviationSummary oracle_summary;
    if (with_oracle) {
        oracle_summary = compare_to_reference(ensemble, me.states);
        detail::add_check(checks, "oracle max |z|", oracle_summary.max_z, 4.0,
                          oracle_summary.max_z <= 4.0);
        detail::add_check(checks, "oracle fraction within 3 SE", oracle_summary.frac_within_3,
                          0.99, oracle_summary.frac_within_3 >= 0.99);
    }

    ScenarioOutcome outcome;
    outcome.checks = checks;
    for (const auto& c : checks) outcome.passed = outcome.passed && c.passed;

    std::string rep;
    rep += "scenario: " + scenario_name(cfg.scenario) + "\n";
    rep += "time unit: " + setup.time_label + "\n";
    rep += "grid: t_end = " + detail::fmt6(cfg.t_end) + " (natural units), n_steps = " +
           std::to_string(cfg.n_steps) + ", integrator substeps per step = " +
           std::to_string(me.substeps_used) + "\n";
    if (with_oracle)
        rep += "oracle: n_traj = " + std::to_string(cfg.n_traj) + ", seed = " +
               std::to_string(cfg.seed) + ", max |z| = " + detail::fmt6(oracle_summary.max_z) +
               ", fraction within 3 SE = " + detail::fmt6(oracle_summary.frac_within_3) + "\n";
    else
        rep += "oracle: off\n";
    if (setup.analytic)
        rep += "analytic reference: exact dephasing solution; max element deviation = " +
               detail::fmt6(analytic_max_dev) + " at t = " + detail::fmt6(analytic_max_dev_t) +
               "\n";
    else
        rep += "analytic reference: none (short-time law check only)\n";
    if (cfg.scenario == ScenarioKind::two_atom_dfs) {
        bool stationary = false;
        for (const auto& c : checks)
            if (c.name == "stationarity deviation") stationary = c.passed;
        rep += std::string("stationary: ") + (stationary ? "yes" : "no") + "\n";
    }
    rep += "checks:\n";
    for (const auto& c : checks) {
        if (!c.applicable) {
            rep += "  " + c.name + ": n/a (" + c.note + ")\n";
            continue;
        }
        rep += "  " + c.name + " = " + detail::fmt6(c.value) + " (tol " +
               detail::fmt6(c.tolerance) + "): " + (c.passed ? "PASS" : "FAIL");
        if (!c.note.empty()) rep += " [" + c.note + "]";
        rep += "\n";
    }
    rep += std::string("overall: ") + (outcome.passed ? "PASS" : "FAIL") + "\n";
    outcome.report = rep;

    outcome.csv = build_timeseries_csv(setup, me, with_oracle ? &ensemble : nullptr);

    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + cfg.out_dir + "'");
    outcome.csv_path = std::filesystem::path(cfg.out_dir) / "timeseries.csv";
    outcome.report_path = std::filesystem::path(cfg.out_dir) / "report.txt";
    detail::write_text_file(outcome.csv_path, outcome.csv);
    detail::write_text_file(outcome.report_path, outcome.report);
    return outcome;
}

// Convergence of the truncated oscillator space: the same physical run at
// n_fock in {3, 5, 8, 12}, with ground-state populations compared between
// successive truncations at a handful of checkpoint times.
struct TruncationStudy {
    std::vector<std::size_t> n_fock_values;
    std::vector<double> checkpoint_times;  // natural units
    std::vector<std::vector<double>> ground_pop;  // [n_fock index][checkpoint]
    std::string table;
    std::string csv;
    std::filesystem::path csv_path;
};

inline TruncationStudy truncation_study(const ScenarioConfig& cfg) {
    if (cfg.scenario != ScenarioKind::ion_heating)
        throw ConfigError("truncation-study requires an ion_heating config");

    TruncationStudy study;
    study.n_fock_values = {3, 5, 8, 12};

    const std::vector<double> grid_times = TimeGrid::of(0.0, cfg.t_end, cfg.n_steps).times();
    std::vector<std::size_t> checkpoint_idx;
    for (double frac : {0.25, 0.5, 0.75, 1.0}) {
        const std::size_t idx = static_cast<std::size_t>(
            std::llround(frac * static_cast<double>(cfg.n_steps)));
        if (checkpoint_idx.empty() || checkpoint_idx.back() != idx) checkpoint_idx.push_back(idx);
    }
    for (std::size_t idx : checkpoint_idx) study.checkpoint_times.push_back(grid_times[idx]);

    for (std::size_t n : study.n_fock_values) {
        ScenarioConfig variant = cfg;
        variant.n_fock = n;
        const ScenarioSetup setup = build_scenario(variant);
        EvolveOptions opts;
        opts.substeps = cfg.substeps;
        const EvolutionResult me =
            evolve_master_equation(setup.model, setup.rho0, setup.grid, opts);
        std::vector<double> pops;
        for (std::size_t idx : checkpoint_idx) pops.push_back(me.states[idx](0, 0).real());
        study.ground_pop.push_back(std::move(pops));
    }

    std::string table = "truncation study: ground-state population rho_00 vs n_fock\n";
    table += "omega0_t";
    for (std::size_t n : study.n_fock_values) table += "  n_fock=" + std::to_string(n);
    table += "  |d(3->5)|  |d(5->8)|  |d(8->12)|\n";
    std::string csv = "omega0_t";
    for (std::size_t n : study.n_fock_values) csv += ",rho00_nfock" + std::to_string(n);
    csv += ",diff_3_5,diff_5_8,diff_8_12\n";
    for (std::size_t c = 0; c < study.checkpoint_times.size(); ++c) {
        table += detail::fmt6(study.checkpoint_times[c]);
        csv += detail::fmt17(study.checkpoint_times[c]);
        for (std::size_t ni = 0; ni < study.n_fock_values.size(); ++ni) {
            table += "  " + detail::fmt6(study.ground_pop[ni][c]);
            csv += "," + detail::fmt17(study.ground_pop[ni][c]);
        }
        for (std::size_t ni = 0; ni + 1 < study.n_fock_values.size(); ++ni) {
            const double diff = std::abs(study.ground_pop[ni + 1][c] - study.ground_pop[ni][c]);
            table += "  " + detail::fmt6(diff);
            csv += "," + detail::fmt17(diff);
        }
        table += "\n";
        csv += "\n";
    }
    study.table = table;
    study.csv = csv;

    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + cfg.out_dir + "'");
    study.csv_path = std::filesystem::path(cfg.out_dir) / "truncation.csv";
    detail::write_text_file(study.csv_path, study.csv);
    return study;
}

}  // namespace rhobar
