// Command-line front end: run benchmark cases or a config file, write
// trajectory/metrics/summary files, and merge summaries into tables.
//
// Exit codes: 0 success, 2 infeasible problem, 3 config error,
// 4 solver hit its iteration budget.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "handsoff/experiment.hpp"

namespace {

using namespace handsoff;

int run_command(const std::vector<int>& case_ids, const std::string& config_path,
                const std::string& method, int samples, double threshold, double u_max,
                const std::string& out_dir, int jobs, const SolverOptions& solver_overrides,
                bool quiet) {
    std::vector<ExperimentConfig> configs;
    if (!config_path.empty()) {
        configs.push_back(load_config(config_path));
    }
    for (int id : case_ids) {
        if (id < 1 || id > 9) throw ConfigError("case number must be in 1..9");
        configs.push_back(registry()[id - 1]);
    }
    if (configs.empty()) {
        throw ConfigError("nothing to run: give --case and/or --config");
    }

    for (auto& c : configs) {
        if (samples > 0) c.N = samples;
        if (threshold >= 0.0) c.threshold = threshold;
        if (u_max > 0.0) c.u_max = u_max;
        if (method != "all") c.methods = {method_from_name(method)};
        if (solver_overrides.rho > 0.0) c.solver.rho = solver_overrides.rho;
        if (solver_overrides.max_iter > 0) c.solver.max_iter = solver_overrides.max_iter;
        if (solver_overrides.eps_abs > 0.0) c.solver.eps_abs = solver_overrides.eps_abs;
        if (solver_overrides.eps_feas > 0.0) c.solver.eps_feas = solver_overrides.eps_feas;
        if (solver_overrides.over_relaxation > 0.0) {
            c.solver.over_relaxation = solver_overrides.over_relaxation;
        }
        validate_config(c);
    }

    const auto runs = run_batch(configs, jobs);

    bool any_infeasible = false;
    bool any_maxiter = false;
    for (const auto& run : runs) {
        write_run(run, out_dir);
        // keep the exact configuration next to its outputs
        std::ofstream cfg(std::filesystem::path(out_dir) / run.config.label / "config.json",
                          std::ios::binary);
        cfg << config_to_json(run.config);
        for (const auto& r : run.results) {
            if (r.solution.status == SolveStatus::kInfeasible) any_infeasible = true;
            if (r.solution.status == SolveStatus::kMaxIterations) any_maxiter = true;
            if (!quiet) {
                std::printf("%-8s %-5s N=%-5d density=%.4f  |u|inf=%.6f  terminal=%.3e  "
                            "iters=%d  %s  %.0f ms\n",
                            run.config.label.c_str(), method_name(r.method).c_str(),
                            run.config.N, r.metrics.sparsity_density, r.metrics.linf,
                            r.trajectory.terminal_residual, r.solution.iterations,
                            r.solution.converged
                                ? "converged"
                                : (r.solution.status == SolveStatus::kInfeasible ? "INFEASIBLE"
                                                                                 : "max-iter"),
                            r.wall_ms);
            }
        }
    }
    if (!quiet) std::printf("outputs under %s\n", out_dir.c_str());
    if (any_infeasible) return 2;
    if (any_maxiter) return 4;
    return 0;
}

int table_command(const std::vector<std::string>& dirs, const std::string& out_csv) {
    std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
    const TableOutput table = emit_table(paths);
    if (!out_csv.empty()) {
        std::ofstream out(out_csv, std::ios::binary);
        out << table.csv;
    }
    std::cout << table.text;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse (hands-off) optimal control benchmarks: LASSO / elastic-net / CLOT "
                 "regularized reachability on a ZOH grid"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "solve benchmark cases or a config file");
    std::vector<int> case_ids;
    std::string config_path;
    std::string method = "all";
    int samples = 0;
    double threshold = -1.0;
    double u_max = 0.0;
    std::string out_dir = "runs";
    int jobs = 1;
    bool all_cases = false;
    bool quiet = false;
    SolverOptions overrides;
    overrides.rho = 0.0;
    overrides.max_iter = 0;
    overrides.eps_abs = 0.0;
    overrides.eps_feas = 0.0;
    overrides.over_relaxation = 0.0;
    run->add_option("--case", case_ids, "built-in case number (1..9), repeatable");
    run->add_flag("--all", all_cases, "run all nine built-in cases");
    run->add_option("--config", config_path, "JSON experiment config");
    run->add_option("--method", method, "lasso|en|clot|all")->default_str("all");
    run->add_option("--samples", samples, "grid size N (built-ins use 2000 or 4000)");
    run->add_option("--threshold", threshold, "zero threshold for the sparsity density");
    run->add_option("--u-max", u_max, "control amplitude bound");
    run->add_option("--out", out_dir, "output directory")->default_str("runs");
    run->add_option("--jobs", jobs, "worker threads for batch runs");
    run->add_flag("--quiet", quiet, "suppress per-solve lines");
    run->add_option("--rho", overrides.rho, "splitting penalty (default: auto)");
    run->add_option("--max-iter", overrides.max_iter, "iteration budget");
    run->add_option("--eps-abs", overrides.eps_abs, "consensus residual tolerance");
    run->add_option("--eps-feas", overrides.eps_feas, "terminal residual tolerance");
    run->add_option("--over-relaxation", overrides.over_relaxation, "in [1, 1.8]");

    // table
    auto* table = app.add_subcommand("table", "merge summaries from run directories");
    std::vector<std::string> dirs;
    std::string out_csv;
    table->add_option("dirs", dirs, "run directories containing summary.csv")->required();
    table->add_option("--csv", out_csv, "also write the merged CSV here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (all_cases) {
                case_ids.clear();
                for (int i = 1; i <= 9; ++i) case_ids.push_back(i);
            }
            return run_command(case_ids, config_path, method, samples, threshold, u_max, out_dir,
                               jobs, overrides, quiet);
        }
        return table_command(dirs, out_csv);
    } catch (const handsoff::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
