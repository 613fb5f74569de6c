/*
   Copyright 2026 The gwtheta Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "gwtheta/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "gwtheta/analytics.hpp"
#include "gwtheta/classifier.hpp"
#include "gwtheta/errors.hpp"
#include "gwtheta/harness.hpp"
#include "gwtheta/io.hpp"
#include "gwtheta/limits.hpp"
#include "gwtheta/series.hpp"
#include "gwtheta/simulator.hpp"

namespace gwtheta {

namespace {

struct ModelSource {
    std::string scenario;
    std::string model_path;
    std::optional<double> theta;
    std::optional<double> sigma;
    std::optional<double> r;

    void attach(CLI::App& cmd) {
        auto* s = cmd.add_option("--scenario", scenario, "registry scenario (Ex1 .. Ex10ii)");
        auto* m = cmd.add_option("--model", model_path, "model JSON file");
        s->excludes(m);
        cmd.add_option("--theta", theta, "override theta of the scenario");
        cmd.add_option("--sigma", sigma, "override sigma of the scenario");
        cmd.add_option("--r", r, "override r of the scenario");
    }

    FamilyParams overrides() const {
        FamilyParams p;
        if (theta) p["theta"] = *theta;
        if (sigma) p["sigma"] = *sigma;
        if (r) p["r"] = *r;
        return p;
    }

    ThetaModel load() const {
        if (!model_path.empty()) {
            if (theta || sigma || r)
                throw CLI::ValidationError("--theta/--sigma/--r apply to --scenario only");
            std::ifstream in(model_path);
            if (!in) throw CLI::ValidationError("cannot read model file " + model_path);
            Json j;
            try {
                j = Json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw CLI::ValidationError("model file " + model_path + " is not valid JSON: " + e.what());
            }
            return model_from_json(j);
        }
        if (scenario.empty()) throw CLI::ValidationError("give either --scenario or --model");
        return make_scenario(scenario, overrides()).model;
    }
};

struct Outputs {
    std::string json_out;
    std::string csv_out;

    void attach(CLI::App& cmd) {
        cmd.add_option("--json-out", json_out, "write JSON results to this path");
        cmd.add_option("--csv-out", csv_out, "write CSV results to this path");
    }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
}

unsigned default_workers() {
    if (const char* env = std::getenv("GWTHETA_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed, std::ostream& err) {
    if (seed) return *seed;
    std::random_device rd;
    const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    err << "seed: " << s << " (auto-generated; pass --seed " << s << " to reproduce)\n";
    return s;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"gwtheta: theta-family branching in changing environments"};
    app.require_subcommand(1);

    // analyze
    ModelSource an_src;
    Outputs an_out;
    std::size_t an_n = 100;
    std::size_t an_stride = 0;
    std::size_t an_horizon = 10000;
    auto* analyze = app.add_subcommand("analyze", "composite constants, absorption and moments");
    an_src.attach(*analyze);
    an_out.attach(*analyze);
    analyze->add_option("--n", an_n, "generation")->check(CLI::PositiveNumber);
    analyze->add_option("--stride", an_stride, "emit every stride-th row up to n (default: row n only)");
    analyze->add_option("--limit-horizon", an_horizon, "horizon for limit detection")->check(CLI::PositiveNumber);

    // pmf
    ModelSource pm_src;
    Outputs pm_out;
    std::size_t pm_n = 1;
    bool pm_step = false;
    double pm_tol = kDefaultTailTol;
    std::size_t pm_cutoff = kDefaultMaxCutoff;
    auto* pmf = app.add_subcommand("pmf", "probability masses of Z_n (or of the one-step law)");
    pm_src.attach(*pmf);
    pm_out.attach(*pmf);
    pmf->add_option("--n", pm_n, "generation")->check(CLI::PositiveNumber);
    pmf->add_flag("--step", pm_step, "one-step offspring law f_n instead of F_n");
    pmf->add_option("--tail-tol", pm_tol, "stop once the remaining mass is below this");
    pmf->add_option("--max-cutoff", pm_cutoff, "largest count to tabulate");

    // simulate
    ModelSource si_src;
    Outputs si_out;
    std::size_t si_n = 100;
    std::size_t si_reps = 10000;
    std::optional<std::uint64_t> si_seed;
    unsigned si_workers = default_workers();
    std::string si_mode = "direct";
    bool si_condition = false;
    bool si_censor = false;
    std::uint64_t si_cap = kDefaultPopulationCap;
    std::string si_traj;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo ensemble of Z_n");
    si_src.attach(*simulate);
    si_out.attach(*simulate);
    simulate->add_option("--n", si_n, "horizon")->check(CLI::PositiveNumber);
    simulate->add_option("--replicates", si_reps, "number of replicates")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", si_seed, "base seed (logged when omitted)");
    simulate->add_option("--workers", si_workers, "worker threads (default GWTHETA_WORKERS)")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--mode", si_mode, "direct | generational")
        ->check(CLI::IsMember({"direct", "generational"}));
    simulate->add_flag("--condition-survival", si_condition, "condition on Z_n > 0 (direct mode)");
    simulate->add_flag("--censor-tail", si_censor, "censor draws above the tabulated range");
    simulate->add_option("--cap", si_cap, "population cap for generational runs");
    simulate->add_option("--trajectory-csv", si_traj, "also write one trajectory (replicate 0)");

    // classify
    ModelSource cl_src;
    Outputs cl_out;
    std::size_t cl_horizon = 10000;
    double cl_tol = 1e-6;
    bool cl_conditions = false;
    auto* classify_cmd = app.add_subcommand("classify", "regime label with limit evidence");
    cl_src.attach(*classify_cmd);
    cl_out.attach(*classify_cmd);
    classify_cmd->add_option("--horizon", cl_horizon, "limit-detection horizon")->check(CLI::PositiveNumber);
    classify_cmd->add_option("--tol", cl_tol, "limit-detection tolerance")->check(CLI::PositiveNumber);
    classify_cmd->add_flag("--conditions", cl_conditions, "also report almost-sure convergence conditions");

    // verify
    std::vector<std::string> ve_scenarios;
    Outputs ve_out;
    HarnessConfig ve_cfg;
    std::optional<std::uint64_t> ve_seed;
    std::optional<std::size_t> ve_horizon;
    std::optional<double> ve_theta, ve_sigma, ve_r;
    ve_cfg.workers = default_workers();
    auto* verify = app.add_subcommand("verify", "check limit theorems on registry scenarios");
    verify->add_option("--scenario", ve_scenarios, "scenario id(s); default: all");
    verify->add_option("--replicates", ve_cfg.replicates, "Monte Carlo replicates")->check(CLI::PositiveNumber);
    verify->add_option("--horizon", ve_horizon, "Monte Carlo horizon override")->check(CLI::PositiveNumber);
    verify->add_option("--seed", ve_seed, "base seed (logged when omitted)");
    verify->add_option("--workers", ve_cfg.workers, "worker threads (default GWTHETA_WORKERS)")
        ->check(CLI::PositiveNumber);
    verify->add_option("--theta", ve_theta, "override theta (single scenario)");
    verify->add_option("--sigma", ve_sigma, "override sigma (single scenario)");
    verify->add_option("--r", ve_r, "override r (single scenario)");
    ve_out.attach(*verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*analyze) {
            const ThetaModel model = an_src.load();
            const std::size_t stride = an_stride == 0 ? an_n : an_stride;
            const auto rows = analyze_rows(model, an_n, stride);
            std::ostringstream csv;
            write_analyze_csv(csv, rows);
            out << csv.str();
            if (!an_out.csv_out.empty()) write_file(an_out.csv_out, csv.str());
            if (!an_out.json_out.empty()) {
                Json j;
                j["model"] = to_json(model);
                j["case"] = std::string(to_string(model.case_label()));
                Json arr = Json::array();
                for (const auto& row : rows) arr.push_back(to_json(row));
                j["rows"] = arr;
                const LimitConstants lim = limit_constants(model, std::max(an_horizon, an_n), 1e-6);
                j["limits"] = to_json(lim);
                j["absorption"] = to_json(absorption_probabilities(model, lim));
                write_file(an_out.json_out, j.dump(2) + "\n");
            }
            return kExitOk;
        }
        if (*pmf) {
            const ThetaModel model = pm_src.load();
            const ThetaPgf g = pm_step ? ThetaPgf::step(model, pm_n)
                                       : ThetaPgf::composite(model, composite_constants(model, pm_n));
            const Pmf p = pmf_from_theta_pgf(g, pm_tol, pm_cutoff);
            std::ostringstream csv;
            write_pmf_csv(csv, p);
            if (!pm_out.csv_out.empty())
                write_file(pm_out.csv_out, csv.str());
            else
                out << csv.str();
            if (!pm_out.json_out.empty()) {
                Json j;
                j["n"] = pm_n;
                j["law"] = pm_step ? "step" : "composite";
                j["cutoff"] = p.cutoff();
                j["tail_mass"] = json_number(p.tail_mass);
                j["defect_mass"] = json_number(p.defect_mass);
                j["clipped_mass"] = json_number(p.clipped_mass);
                Json w = Json::array();
                for (const double x : p.weights) w.push_back(json_number(x));
                j["weights"] = w;
                write_file(pm_out.json_out, j.dump(2) + "\n");
            }
            return kExitOk;
        }
        if (*simulate) {
            const ThetaModel model = si_src.load();
            EnsembleConfig ec;
            ec.horizon = si_n;
            ec.replicates = si_reps;
            ec.base_seed = resolve_seed(si_seed, err);
            ec.workers = si_workers;
            ec.mode = si_mode == "direct" ? SimMode::direct : SimMode::generational;
            ec.conditioning = si_condition ? Conditioning::survival : Conditioning::none;
            if (si_condition && ec.mode != SimMode::direct)
                throw CLI::ValidationError("--condition-survival requires --mode direct");
            ec.population_cap = si_cap;
            ec.sampler.censor_tail = si_censor;
            const EnsembleStats s = run_ensemble(model, ec);
            Json j = to_json(s);
            j["seed"] = ec.base_seed;
            j["model"] = to_json(model);
            const std::string text = j.dump(2) + "\n";
            if (!si_out.json_out.empty())
                write_file(si_out.json_out, text);
            else
                out << text;
            if (!si_traj.empty()) {
                SimOptions so;
                so.population_cap = si_cap;
                so.sampler = ec.sampler;
                std::ostringstream csv;
                write_trajectory_csv(csv, simulate_trajectory(model, si_n, ec.base_seed, so));
                write_file(si_traj, csv.str());
            }
            return kExitOk;
        }
        if (*classify_cmd) {
            const ThetaModel model = cl_src.load();
            const LimitConstants lim = limit_constants(model, cl_horizon, cl_tol);
            Json j = to_json(classify(model, lim));
            if (cl_conditions) j["conditions"] = to_json(convergence_conditions(model, cl_horizon, cl_tol));
            const std::string text = j.dump(2) + "\n";
            out << text;
            if (!cl_out.json_out.empty()) write_file(cl_out.json_out, text);
            return kExitOk;
        }
        if (*verify) {
            ve_cfg.seed = resolve_seed(ve_seed, err);
            ve_cfg.horizon = ve_horizon;
            FamilyParams overrides;
            if (ve_theta) overrides["theta"] = *ve_theta;
            if (ve_sigma) overrides["sigma"] = *ve_sigma;
            if (ve_r) overrides["r"] = *ve_r;
            if (!overrides.empty() && ve_scenarios.size() != 1)
                throw CLI::ValidationError("--theta/--sigma/--r need exactly one --scenario");

            std::vector<VerificationReport> reports;
            if (ve_scenarios.empty()) {
                reports = run_all(ve_cfg);
            } else {
                for (const std::string& id : ve_scenarios)
                    reports.push_back(verify_theorem(make_scenario(id, overrides), ve_cfg));
            }
            std::ostringstream table;
            write_summary_table(table, reports);
            out << table.str();
            bool all = true;
            for (const auto& r : reports) {
                all = all && r.pass();
                if (r.low_power) err << r.scenario_id << ": low power (replicates < " << kLowPowerReplicates
                                     << "), z widened to 6\n";
                for (const Check& c : r.checks)
                    if (!c.pass && !c.informational)
                        err << r.scenario_id << ": FAIL " << c.name << " (statistic " << format_double(c.statistic)
                            << ", target " << format_double(c.target) << ", tolerance "
                            << format_double(c.tolerance) << ") " << c.note << '\n';
            }
            if (!ve_out.json_out.empty()) {
                Json arr = Json::array();
                for (const auto& r : reports) arr.push_back(to_json(r));
                write_file(ve_out.json_out, arr.dump(2) + "\n");
            }
            if (!ve_out.csv_out.empty()) {
                std::ostringstream csv;
                write_plot_csv(csv, reports);
                write_file(ve_out.csv_out, csv.str());
            }
            return all ? kExitOk : kExitCheckFailed;
        }
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const RejectedParameter& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ScenarioInfeasible& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitCheckFailed;
    }
    return kExitUsage;
}

}  // namespace gwtheta
