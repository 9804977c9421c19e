// ehdet command-line front end: steady-state export, threshold optimization,
// Monte Carlo simulation, and parameter sweeps, all emitting CSV.
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "ehdet/battery.hpp"
#include "ehdet/channel.hpp"
#include "ehdet/config_io.hpp"
#include "ehdet/csv.hpp"
#include "ehdet/divergence.hpp"
#include "ehdet/optimizer.hpp"
#include "ehdet/simulator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

struct CliError {
    int code;
    std::string message;
};

std::string g_command_line;

std::string header_comments(const ehdet::ExperimentConfig& config, const std::string& schema) {
    std::ostringstream out;
    out << "# command = " << g_command_line << "\n";
    out << "# config = " << ehdet::config_snapshot(config) << "\n";
    out << "# seed = " << config.seed << "\n";
    out << "# schema = " << schema << "\n";
    return out.str();
}

ehdet::ExperimentConfig load_and_validate(const std::string& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) {
        throw CliError{kExitConfig, "config not found: " + path};
    }
    ehdet::ExperimentConfig config;
    try {
        config = ehdet::load_config(path);
    } catch (const ehdet::ConfigError& e) {
        throw CliError{kExitConfig, e.what()};
    }
    const auto violations = ehdet::validate(config);
    if (!violations.empty()) {
        std::string msg = "invalid config:";
        for (const auto& v : violations) {
            msg += "\n  " + v;
        }
        throw CliError{kExitConfig, msg};
    }
    return config;
}

void apply_axis(ehdet::ExperimentConfig& config, const std::string& axis, double value) {
    if (axis == "rho") {
        config.harvest.rate = value;
    } else if (axis == "c1") {
        config.policy.coeffs.at(0) = value;
    } else if (axis == "K") {
        config.policy.capacity = static_cast<int>(value);
    } else if (axis == "gamma_g") {
        for (auto& s : config.sensors) {
            s.mean_sq_gain = value;
        }
    } else if (axis == "snr_s") {
        for (auto& s : config.sensors) {
            if (s.signal_amplitude) {
                s.signal_amplitude = std::sqrt(s.obs_noise_var) * std::pow(10.0, value / 20.0);
            }
        }
    } else if (axis == "snr") {
        for (auto& s : config.sensors) {
            s.ch_noise_var = std::pow(10.0, -value / 10.0);
        }
    } else if (axis == "P0") {
        for (auto& s : config.sensors) {
            if (s.deployment) {
                s.deployment->source_power = value;
            }
        }
    } else {
        throw CliError{kExitConfig, "unknown sweep axis: " + axis};
    }
    const auto violations = ehdet::validate(config);
    if (!violations.empty()) {
        std::string msg = "axis value " + ehdet::format_full(value) + " makes config invalid:";
        for (const auto& v : violations) {
            msg += "\n  " + v;
        }
        throw CliError{kExitConfig, msg};
    }
}

int cmd_steady_state(const std::string& config_path, const std::string& out_dir) {
    const auto config = load_and_validate(config_path);
    if (!config.design) {
        throw CliError{kExitConfig, "config has no design section (required for steady-state)"};
    }
    const auto design = ehdet::design_from_config(config);
    std::filesystem::create_directories(out_dir);

    std::string summary = header_comments(config, "steady/v1");
    summary += "sensor,b_bar\n";
    for (std::size_t n = 0; n < config.sensors.size(); ++n) {
        const auto& p = design.sensors[n];
        const ehdet::OperatingPoint op{p.theta, p.pf, p.pd};
        const ehdet::Quantizer quant{p.thresholds, p.interval_probs};
        const auto chain =
            ehdet::build_chain(config.policy, config.harvest, quant, op, config.priors);
        const std::string tag = "_s" + std::to_string(n) + ".csv";
        ehdet::write_file(out_dir + "/psi" + tag,
                          header_comments(config, "psi/v1") + ehdet::matrix_csv(chain.transition));
        ehdet::write_file(out_dir + "/phi" + tag,
                          header_comments(config, "phi/v1") + ehdet::vector_csv(chain.steady));
        summary += std::to_string(n) + "," + ehdet::format_full(chain.mean_energy) + "\n";
    }
    ehdet::write_file(out_dir + "/summary.csv", summary);
    std::cout << "wrote steady-state files to " << out_dir << "\n";
    return kExitOk;
}

std::string report_csv(const ehdet::ExperimentConfig& config, const ehdet::SolveReport& report,
                       const std::string& problem) {
    std::string out = header_comments(config, "solve/v1");
    out += "# problem = " + problem + "\n";
    out += "# status = " + ehdet::to_string(report.status) + "\n";
    out += "# objective = " + ehdet::format_full(report.objective) + "\n";
    out += "# evaluations = " + std::to_string(report.evaluations) + "\n";
    out += "sensor,pd,pf,theta,interval_probs,thresholds,constraint_value\n";
    for (std::size_t n = 0; n < report.design.sensors.size(); ++n) {
        const auto& p = report.design.sensors[n];
        std::vector<double> finite(p.thresholds.begin() + 1, p.thresholds.end() - 1);
        out += std::to_string(n) + "," + ehdet::format_full(p.pd) + "," +
               ehdet::format_full(p.pf) + "," + ehdet::format_full(p.theta) + "," +
               ehdet::join_full(p.interval_probs) + "," + ehdet::join_full(finite) + "," +
               ehdet::format_full(report.constraint_values[n]) + "\n";
    }
    return out;
}

int cmd_optimize(const std::string& config_path, const std::string& problem, double budget,
                 double floor, const std::string& out_design, const std::string& out_report,
                 const std::string& trace_path) {
    const auto config = load_and_validate(config_path);
    std::vector<ehdet::EvalRecord> trace;
    std::vector<ehdet::EvalRecord>* trace_ptr = trace_path.empty() ? nullptr : &trace;

    ehdet::SolveReport report;
    if (problem == "p1") {
        report = ehdet::solve_p1(config, budget, {}, trace_ptr);
    } else {
        report = ehdet::solve_p2(config, floor, {}, trace_ptr);
    }

    ehdet::save_design(report.design, out_design);
    ehdet::write_file(out_report, report_csv(config, report, problem));
    if (!trace_path.empty()) {
        std::string tr = header_comments(config, "solve-trace/v1");
        tr += "sensor,eval,pd,interval_probs,divergence,power\n";
        for (std::size_t i = 0; i < trace.size(); ++i) {
            const auto& r = trace[i];
            tr += std::to_string(r.sensor) + "," + std::to_string(i) + "," +
                  ehdet::format_full(r.pd) + "," + ehdet::join_full(r.interval_probs) + "," +
                  ehdet::format_full(r.divergence) + "," + ehdet::format_full(r.power) + "\n";
        }
        ehdet::write_file(trace_path, tr);
    }
    std::cout << "status: " << ehdet::to_string(report.status)
              << "  objective: " << report.objective << "\n";
    return report.status == ehdet::SolveStatus::infeasible ? kExitInfeasible : kExitOk;
}

int cmd_simulate(const std::string& config_path, const std::string& design_path, long trials,
                 std::uint64_t seed, bool seed_given, const std::string& out_path,
                 const std::string& trace_path) {
    auto config = load_and_validate(config_path);
    if (seed_given) {
        config.seed = seed;
    }
    ehdet::DesignPoint design;
    if (!design_path.empty()) {
        design = ehdet::load_design(design_path);
        if (design.sensors.size() != config.sensors.size()) {
            throw CliError{kExitConfig, "design file sensor count does not match config"};
        }
    } else if (config.design) {
        design = ehdet::design_from_config(config);
    } else {
        throw CliError{kExitConfig, "no design: pass --design or add a design section"};
    }
    const long n_trials = trials > 0 ? trials : config.trials;

    std::ofstream trace;
    std::ostream* trace_ptr = nullptr;
    if (!trace_path.empty()) {
        trace.open(trace_path, std::ios::binary);
        if (!trace) {
            throw CliError{kExitConfig, "cannot write trace: " + trace_path};
        }
        trace << header_comments(config, "trace/v1");
        trace_ptr = &trace;
    }

    const auto stats = ehdet::run_trials_detailed(config, design, n_trials, config.seed, trace_ptr);
    std::string out = header_comments(config, "pe/v1");
    out += "pe,trials,ci95,seed,pe_low_snr,pe_clt,battery_mode,fc_amplitude\n";
    out += ehdet::format_full(stats.estimate.pe) + "," + std::to_string(stats.estimate.trials) +
           "," + ehdet::format_full(stats.estimate.ci95) + "," +
           std::to_string(stats.estimate.seed) + "," +
           ehdet::format_full(stats.mean_pe_low_snr) + "," +
           ehdet::format_full(stats.mean_pe_clt) + "," +
           (config.mc.battery_init == ehdet::BatteryInitMode::steady ? "steady" : "evolve") +
           "," +
           (config.mc.fc_amplitude == ehdet::FcAmplitudeMode::genie ? "genie" : "expected") +
           "\n";
    ehdet::write_file(out_path, out);
    std::cout << "pe = " << stats.estimate.pe << " +- " << stats.estimate.ci95 << " ("
              << n_trials << " trials)\n";
    return kExitOk;
}

struct SweepRow {
    double value = 0.0;
    std::string status;
    double objective = 0.0;
    double p_tot = 0.0;
    double b_bar_mean = 0.0;
    ehdet::TrialStats stats;
    long evaluations = 0;
};

int cmd_sweep(const std::string& config_path, const std::string& axis,
              const std::string& grid_arg, const std::string& problem, double budget,
              double floor, long trials, std::uint64_t seed, bool seed_given,
              const std::string& out_path) {
    auto base = load_and_validate(config_path);
    if (seed_given) {
        base.seed = seed;
    }
    const auto& axes = ehdet::sweepable_params();
    if (std::find(axes.begin(), axes.end(), axis) == axes.end()) {
        throw CliError{kExitConfig, "unknown sweep axis: " + axis};
    }

    std::vector<double> grid;
    if (!grid_arg.empty()) {
        std::stringstream ss(grid_arg);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                grid.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw CliError{kExitConfig, "bad grid value: " + item};
            }
        }
    } else {
        for (const auto& sw : base.sweep) {
            if (sw.param == axis) {
                grid = sw.grid;
            }
        }
    }
    if (grid.empty()) {
        throw CliError{kExitConfig, "empty sweep grid"};
    }
    const long n_trials = trials > 0 ? trials : base.trials;

    int workers = 1;
    if (const char* env = std::getenv("EHDET_WORKERS")) {
        workers = std::max(1, std::atoi(env));
    }

    std::vector<SweepRow> rows(grid.size());
    std::vector<std::string> errors(grid.size());
    std::atomic<std::size_t> next{0};

    auto run_point = [&](std::size_t idx) {
        try {
            ehdet::ExperimentConfig config = base;
            apply_axis(config, axis, grid[idx]);
            SweepRow row;
            row.value = grid[idx];
            ehdet::DesignPoint design;
            if (problem == "p1") {
                const auto report = ehdet::solve_p1(config, budget);
                design = report.design;
                row.status = ehdet::to_string(report.status);
                row.objective = report.objective;
                row.evaluations = report.evaluations;
            } else if (problem == "p2") {
                const auto report = ehdet::solve_p2(config, floor);
                design = report.design;
                row.status = ehdet::to_string(report.status);
                row.objective = report.objective;
                row.evaluations = report.evaluations;
            } else {
                if (!config.design) {
                    throw CliError{kExitConfig, "sweep without --problem needs a config design"};
                }
                design = ehdet::design_from_config(config);
                row.status = "fixed";
                const auto metrics = ehdet::evaluate_design(config, design);
                for (double j : metrics.divergence) {
                    row.objective += j;
                }
            }
            const auto metrics = ehdet::evaluate_design(config, design);
            for (double p : metrics.power) {
                row.p_tot += p;
            }
            for (double b : metrics.mean_battery) {
                row.b_bar_mean += b;
            }
            row.b_bar_mean /= static_cast<double>(metrics.mean_battery.size());
            row.stats = ehdet::run_trials_detailed(config, design, n_trials, config.seed);
            rows[idx] = std::move(row);
        } catch (const CliError& e) {
            errors[idx] = e.message;
        } catch (const std::exception& e) {
            errors[idx] = e.what();
        }
    };

    if (workers == 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            run_point(i);
        }
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
                    run_point(i);
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!errors[i].empty()) {
            throw CliError{kExitNumerical, "sweep point " + ehdet::format_full(grid[i]) +
                                               " failed: " + errors[i]};
        }
    }

    std::string out = header_comments(base, "sweep/v1");
    out += "# axis = " + axis + "\n";
    out += "# trials = " + std::to_string(n_trials) + "\n";
    out += "axis,value,status,objective,p_tot,b_bar_mean,pe_mc,ci95,pe_low_snr,pe_clt,"
           "evaluations\n";
    for (const SweepRow& row : rows) {
        out += axis + "," + ehdet::format_full(row.value) + "," + row.status + "," +
               ehdet::format_full(row.objective) + "," + ehdet::format_full(row.p_tot) + "," +
               ehdet::format_full(row.b_bar_mean) + "," +
               ehdet::format_full(row.stats.estimate.pe) + "," +
               ehdet::format_full(row.stats.estimate.ci95) + "," +
               ehdet::format_full(row.stats.mean_pe_low_snr) + "," +
               ehdet::format_full(row.stats.mean_pe_clt) + "," +
               std::to_string(row.evaluations) + "\n";
    }
    ehdet::write_file(out_path, out);
    std::cout << "wrote " << rows.size() << " sweep rows to " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    std::ostringstream cmd;
    for (int i = 0; i < argc; ++i) {
        cmd << (i ? " " : "") << argv[i];
    }
    g_command_line = cmd.str();

    CLI::App app{"energy-harvesting distributed-detection toolkit"};
    app.require_subcommand(1);

    auto* steady = app.add_subcommand("steady-state", "export transition matrix and steady state");
    std::string st_config, st_out_dir = ".";
    steady->add_option("config", st_config)->required();
    steady->add_option("--out-dir", st_out_dir);

    auto* opt = app.add_subcommand("optimize", "solve a threshold-design problem");
    std::string op_config, op_problem, op_design = "design.json";
    std::string op_report = "solve_report.csv", op_trace;
    double op_budget = 0.0, op_floor = 0.0;
    opt->add_option("config", op_config)->required();
    opt->add_option("--problem", op_problem)->required()->check(CLI::IsMember({"p1", "p2"}));
    auto* budget_opt = opt->add_option("--budget", op_budget, "per-sensor power budget (p1)");
    auto* floor_opt = opt->add_option("--floor", op_floor, "per-sensor divergence floor (p2)");
    opt->add_option("--out", op_design);
    opt->add_option("--report", op_report);
    opt->add_option("--trace-file", op_trace, "dump every candidate evaluation");

    auto* sim = app.add_subcommand("simulate", "Monte Carlo error probability");
    std::string si_config, si_design, si_out = "pe.csv", si_trace;
    long si_trials = 0;
    std::uint64_t si_seed = 0;
    sim->add_option("config", si_config)->required();
    sim->add_option("--design", si_design);
    sim->add_option("--trials", si_trials);
    auto* sim_seed = sim->add_option("--seed", si_seed);
    sim->add_option("--out", si_out);
    sim->add_option("--trace", si_trace, "per-trial CSV dump");

    auto* sweep = app.add_subcommand("sweep", "evaluate along a parameter grid");
    std::string sw_config, sw_axis, sw_grid, sw_problem, sw_out = "sweep.csv";
    double sw_budget = 0.0, sw_floor = 0.0;
    long sw_trials = 0;
    std::uint64_t sw_seed = 0;
    sweep->add_option("config", sw_config)->required();
    sweep->add_option("--axis", sw_axis)->required();
    sweep->add_option("--grid", sw_grid, "comma-separated values (default: config sweep)");
    sweep->add_option("--problem", sw_problem)->check(CLI::IsMember({"p1", "p2"}));
    sweep->add_option("--budget", sw_budget);
    sweep->add_option("--floor", sw_floor);
    sweep->add_option("--trials", sw_trials);
    auto* sweep_seed = sweep->add_option("--seed", sw_seed);
    sweep->add_option("--out", sw_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (steady->parsed()) {
            return cmd_steady_state(st_config, st_out_dir);
        }
        if (opt->parsed()) {
            if (op_problem == "p1" && budget_opt->count() == 0) {
                throw CliError{kExitConfig, "p1 requires --budget"};
            }
            if (op_problem == "p2" && floor_opt->count() == 0) {
                throw CliError{kExitConfig, "p2 requires --floor"};
            }
            return cmd_optimize(op_config, op_problem, op_budget, op_floor, op_design, op_report,
                                op_trace);
        }
        if (sim->parsed()) {
            return cmd_simulate(si_config, si_design, si_trials, si_seed, sim_seed->count() > 0,
                                si_out, si_trace);
        }
        if (sweep->parsed()) {
            return cmd_sweep(sw_config, sw_axis, sw_grid, sw_problem, sw_budget, sw_floor,
                             sw_trials, sw_seed, sweep_seed->count() > 0, sw_out);
        }
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const ehdet::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
