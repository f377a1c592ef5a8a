#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "handsoff/metrics.hpp"
#include "handsoff/plant.hpp"
#include "handsoff/solver.hpp"
#include "handsoff/trajectory.hpp"

namespace handsoff {

enum class Method { kLasso, kEn, kClot };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

/// Raised for unreadable, unparsable or invalid configuration input.
/// The CLI maps it to its own exit code.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One experiment: a plant, horizon, grid, initial state and the methods to
/// run.  Solver settings ride along so a config file reproduces a run
/// exactly.
struct ExperimentConfig {
    std::string label = "custom";
    int case_no = 0;  // 1..9 for built-in benchmark cases, 0 otherwise
    PlantSpec plant;
    bool auto_conjugate = false;  // complete complex roots given singly
    double T = 0.0;
    int N = 2000;
    Eigen::VectorXd xi;
    double lambda = 0.1;
    std::vector<Method> methods{Method::kLasso, Method::kEn, Method::kClot};
    double u_max = 1.0;
    double threshold = 1e-4;
    SolverOptions solver;
};

/// The nine built-in benchmark cases (plants P1..P7; P1 and P2 appear twice
/// with different lambda / initial state; the last two use T = 40).
const std::vector<ExperimentConfig>& registry();

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& config);

/// Throws ConfigError on inconsistent dimensions, nonpositive horizon,
/// negative lambda, unknown methods or non-conjugate root sets.
void validate_config(const ExperimentConfig& config);

struct MethodResult {
    Method method = Method::kLasso;
    Solution solution;
    ControlMetrics metrics;
    Trajectory trajectory;
    double wall_ms = 0.0;
};

struct RunResult {
    ExperimentConfig config;
    DiscreteProblem problem;
    std::vector<MethodResult> results;
};

/// Solves every requested method on one problem.  Pure compute; no files.
RunResult run_case(const ExperimentConfig& config);

/// Writes <out>/<label>/<method>/{trajectory.csv,metrics.json} and appends
/// one row per method to <out>/summary.csv.  Numeric columns use 12
/// significant digits so repeated runs diff clean (wall_ms excepted).
void write_run(const RunResult& run, const std::filesystem::path& out_dir);

/// Runs a batch, optionally with several worker threads (one case per
/// worker); outputs are written in case order regardless of completion
/// order.
std::vector<RunResult> run_batch(const std::vector<ExperimentConfig>& configs, int jobs);

struct TableOutput {
    std::string csv;   // merged summary rows
    std::string text;  // density table, one row per case/N
};

/// Merges summary.csv files from previous run directories.
TableOutput emit_table(const std::vector<std::filesystem::path>& run_dirs);

const char* summary_header();
std::string summary_row(const ExperimentConfig& config, const MethodResult& r);

}  // namespace handsoff
