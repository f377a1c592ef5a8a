#include "handsoff/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

namespace handsoff {

using nlohmann::json;

std::string method_name(Method m) {
    switch (m) {
        case Method::kLasso: return "lasso";
        case Method::kEn: return "en";
        case Method::kClot: return "clot";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    if (name == "lasso") return Method::kLasso;
    if (name == "en") return Method::kEn;
    if (name == "clot") return Method::kClot;
    throw ConfigError("unknown method '" + name + "' (expected lasso, en or clot)");
}

namespace {

std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::complex<double> parse_root(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw ConfigError("roots must be numbers or [re, im] pairs");
}

json root_to_json(const std::complex<double>& r) {
    if (r.imag() == 0.0) return r.real();
    return json::array({r.real(), r.imag()});
}

// Adds missing conjugates for roots given singly.
std::vector<std::complex<double>> complete_conjugates(
    const std::vector<std::complex<double>>& roots) {
    std::vector<std::complex<double>> out = roots;
    std::vector<bool> used(roots.size(), false);
    for (size_t i = 0; i < roots.size(); ++i) {
        if (used[i] || std::abs(roots[i].imag()) <= 1e-12 * std::max(1.0, std::abs(roots[i]))) {
            continue;
        }
        bool paired = false;
        for (size_t j = i + 1; j < roots.size(); ++j) {
            if (!used[j] &&
                std::abs(roots[j] - std::conj(roots[i])) <=
                    1e-9 * std::max(1.0, std::abs(roots[i]))) {
                used[i] = used[j] = true;
                paired = true;
                break;
            }
        }
        if (!paired) out.push_back(std::conj(roots[i]));
    }
    return out;
}

Regularizer make_regularizer(Method m, double lambda, double h) {
    switch (m) {
        case Method::kLasso: return Regularizer::l1(h);
        case Method::kEn: return Regularizer::elastic_net(lambda, h);
        case Method::kClot: return Regularizer::clot(lambda, h);
    }
    throw std::logic_error("unreachable");
}

ExperimentConfig make_case(int no, std::vector<std::complex<double>> poles,
                           std::vector<std::complex<double>> zeros, double T, Eigen::VectorXd xi,
                           double lambda) {
    ExperimentConfig c;
    c.label = "case" + std::to_string(no);
    c.case_no = no;
    c.plant.poles = std::move(poles);
    c.plant.zeros = std::move(zeros);
    c.T = T;
    c.xi = std::move(xi);
    c.lambda = lambda;
    return c;
}

}  // namespace

const std::vector<ExperimentConfig>& registry() {
    static const std::vector<ExperimentConfig> cases = [] {
        using cd = std::complex<double>;
        const double s8 = 2.0 * std::sqrt(2.0);
        std::vector<ExperimentConfig> v;
        v.push_back(make_case(1, {cd(0), cd(0), cd(0), cd(0)}, {}, 20.0, Eigen::VectorXd::Ones(4),
                              1.0));
        v.push_back(make_case(2, {cd(0), cd(0), cd(0), cd(0)}, {}, 20.0, Eigen::VectorXd::Ones(4),
                              0.1));
        v.push_back(make_case(3, {cd(-0.025, 1), cd(-0.025, -1)}, {}, 20.0,
                              Eigen::VectorXd::Ones(2), 0.1));
        Eigen::VectorXd xi_case4(2);
        xi_case4 << 10.0, 1.0;
        v.push_back(make_case(4, {cd(-0.025, 1), cd(-0.025, -1)}, {}, 20.0, xi_case4, 0.1));
        v.push_back(make_case(5, {cd(-1, 0.2), cd(-1, -0.2), cd(0, 1), cd(0, -1)}, {cd(-2)}, 20.0,
                              Eigen::VectorXd::Ones(4), 0.1));
        v.push_back(make_case(6, {cd(-1, 0.2), cd(-1, -0.2), cd(-0.3, 1), cd(-0.3, -1)}, {}, 20.0,
                              Eigen::VectorXd::Ones(4), 0.1));
        v.push_back(make_case(7,
                              {cd(-5, 1), cd(-5, -1), cd(-0.3, 2), cd(-0.3, -2), cd(-1, s8),
                               cd(-1, -s8)},
                              {}, 20.0, Eigen::VectorXd::Ones(6), 0.1));
        v.push_back(make_case(8, {cd(0), cd(0), cd(0), cd(0), cd(0, 1), cd(0, -1)}, {cd(2)}, 40.0,
                              Eigen::VectorXd::Ones(6), 0.1));
        v.push_back(make_case(9, {cd(0), cd(0), cd(0), cd(0), cd(0, 1), cd(0, -1)},
                              {cd(1), cd(2)}, 40.0, Eigen::VectorXd::Ones(6), 0.1));
        return v;
    }();
    return cases;
}

void validate_config(const ExperimentConfig& config) {
    if (config.T <= 0.0) throw ConfigError("horizon T must be positive");
    if (config.N < 1) throw ConfigError("sample count N must be at least 1");
    if (config.u_max <= 0.0) throw ConfigError("u_max must be positive");
    if (config.threshold < 0.0) throw ConfigError("threshold must be nonnegative");
    if (config.plant.poles.empty()) throw ConfigError("plant needs at least one pole");
    if (config.plant.zeros.size() >= config.plant.poles.size()) {
        throw ConfigError("plant must be strictly proper (fewer zeros than poles)");
    }
    if (config.methods.empty()) throw ConfigError("no methods requested");
    if (config.lambda < 0.0) throw ConfigError("lambda must be nonnegative");
    if (config.xi.size() != static_cast<Eigen::Index>(config.plant.poles.size())) {
        throw ConfigError("initial state dimension must equal the number of poles");
    }
    try {
        poly_from_roots(config.plant.poles);
        poly_from_roots(config.plant.zeros);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    ExperimentConfig c;
    try {
        c.label = j.value("label", std::string("custom"));
        c.case_no = j.value("case_no", 0);
        const json& plant = j.at("plant");
        for (const auto& r : plant.value("poles", json::array())) {
            c.plant.poles.push_back(parse_root(r));
        }
        for (const auto& r : plant.value("zeros", json::array())) {
            c.plant.zeros.push_back(parse_root(r));
        }
        c.plant.gain = plant.value("gain", 1.0);
        c.auto_conjugate = plant.value("auto_conjugate", false);
        if (c.auto_conjugate) {
            c.plant.poles = complete_conjugates(c.plant.poles);
            c.plant.zeros = complete_conjugates(c.plant.zeros);
        }
        c.T = j.at("T").get<double>();
        c.N = j.value("N", 2000);
        const auto xi = j.at("xi").get<std::vector<double>>();
        c.xi = Eigen::Map<const Eigen::VectorXd>(xi.data(), xi.size());
        c.lambda = j.value("lambda", 0.0);
        if (j.contains("methods")) {
            c.methods.clear();
            for (const auto& m : j["methods"]) c.methods.push_back(method_from_name(m));
        }
        c.u_max = j.value("u_max", 1.0);
        c.threshold = j.value("threshold", 1e-4);
        if (j.contains("solver")) {
            const json& s = j["solver"];
            c.solver.rho = s.value("rho", c.solver.rho);
            c.solver.max_iter = s.value("max_iter", c.solver.max_iter);
            c.solver.eps_abs = s.value("eps_abs", c.solver.eps_abs);
            c.solver.eps_feas = s.value("eps_feas", c.solver.eps_feas);
            c.solver.over_relaxation = s.value("over_relaxation", c.solver.over_relaxation);
            c.solver.gap_tol = s.value("gap_tol", c.solver.gap_tol);
            c.solver.check_interval = s.value("check_interval", c.solver.check_interval);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }
    validate_config(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& c) {
    json plant;
    plant["poles"] = json::array();
    for (const auto& r : c.plant.poles) plant["poles"].push_back(root_to_json(r));
    plant["zeros"] = json::array();
    for (const auto& r : c.plant.zeros) plant["zeros"].push_back(root_to_json(r));
    plant["gain"] = c.plant.gain;
    plant["auto_conjugate"] = c.auto_conjugate;

    json j;
    j["label"] = c.label;
    j["case_no"] = c.case_no;
    j["plant"] = plant;
    j["T"] = c.T;
    j["N"] = c.N;
    j["xi"] = std::vector<double>(c.xi.data(), c.xi.data() + c.xi.size());
    j["lambda"] = c.lambda;
    json methods = json::array();
    for (auto m : c.methods) methods.push_back(method_name(m));
    j["methods"] = methods;
    j["u_max"] = c.u_max;
    j["threshold"] = c.threshold;
    j["solver"] = {{"rho", c.solver.rho},
                   {"max_iter", c.solver.max_iter},
                   {"eps_abs", c.solver.eps_abs},
                   {"eps_feas", c.solver.eps_feas},
                   {"over_relaxation", c.solver.over_relaxation},
                   {"gap_tol", c.solver.gap_tol},
                   {"check_interval", c.solver.check_interval}};
    return j.dump(2) + "\n";
}

RunResult run_case(const ExperimentConfig& config) {
    validate_config(config);
    RunResult run;
    run.config = config;

    const StateSpace ss = realize(config.plant);
    const InitialValueProblem ivp{ss, config.xi, config.T, config.u_max};
    run.problem = build_problem(ivp, config.N);
    const DiscreteSystem ds = zoh_discretize(ss, run.problem.h, config.N);

    for (Method m : config.methods) {
        MethodResult mr;
        mr.method = m;
        const Regularizer reg = make_regularizer(m, config.lambda, run.problem.h);
        SolverOptions opts = config.solver;
        // the simulated terminal state equals Phi u - b, so cap the absolute
        // terminal tolerance at half the reporting requirement on ||x(T)||
        opts.eps_feas_abs =
            std::min(opts.eps_feas_abs, 0.5e-6 * (1.0 + config.xi.norm()));
        const auto t0 = std::chrono::steady_clock::now();
        mr.solution = solve(run.problem, reg, opts);
        const auto t1 = std::chrono::steady_clock::now();
        mr.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        mr.metrics = compute_metrics(mr.solution.u, run.problem.h, config.threshold);
        mr.trajectory = simulate(ds, config.xi, mr.solution.u);
        run.results.push_back(std::move(mr));
    }
    return run;
}

namespace {

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::kConverged: return "converged";
        case SolveStatus::kMaxIterations: return "max_iterations";
        case SolveStatus::kInfeasible: return "infeasible";
    }
    return "?";
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream out(path, std::ios::binary);
    const int n = static_cast<int>(traj.states.cols());
    out << "t,u";
    for (int k = 1; k <= n; ++k) out << ",x" << k;
    out << ",norm_x\n";
    const Eigen::VectorXd norms = state_norms(traj);
    const Eigen::Index N = traj.control.size();
    for (Eigen::Index m = 0; m < traj.times.size(); ++m) {
        // control is held on [t, t+h); the final row repeats the last hold
        const double u = traj.control(std::min(m, N - 1));
        out << fmt12(traj.times(m)) << ',' << fmt12(u);
        for (int k = 0; k < n; ++k) out << ',' << fmt12(traj.states(m, k));
        out << ',' << fmt12(norms(m)) << '\n';
    }
}

void write_metrics_json(const std::filesystem::path& path, const ExperimentConfig& config,
                        const MethodResult& r) {
    json j;
    j["method"] = method_name(r.method);
    j["case_no"] = config.case_no;
    j["N"] = config.N;
    j["h"] = config.T / config.N;
    j["lambda"] = config.lambda;
    j["threshold"] = r.metrics.threshold;
    j["sparsity_density"] = r.metrics.sparsity_density;
    j["l1"] = r.metrics.l1;
    j["l2"] = r.metrics.l2;
    j["linf"] = r.metrics.linf;
    j["max_step"] = r.metrics.max_step;
    j["objective"] = r.solution.objective;
    j["iterations"] = r.solution.iterations;
    j["converged"] = r.solution.converged;
    j["status"] = status_name(r.solution.status);
    j["primal_residual"] = r.solution.primal_residual;
    j["dual_residual"] = r.solution.dual_residual;
    j["terminal_residual"] = r.solution.terminal_residual;
    j["terminal_state_norm"] = r.trajectory.terminal_residual;
    j["polished"] = r.solution.polished;
    if (std::isfinite(r.solution.duality_gap)) j["duality_gap"] = r.solution.duality_gap;
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << '\n';
}

}  // namespace

const char* summary_header() {
    return "case_no,method,N,lambda,density,l1,l2,linf,max_step,terminal_residual,iterations,"
           "wall_ms\n";
}

std::string summary_row(const ExperimentConfig& config, const MethodResult& r) {
    std::ostringstream os;
    os << config.case_no << ',' << method_name(r.method) << ',' << config.N << ','
       << fmt12(config.lambda) << ',' << fmt12(r.metrics.sparsity_density) << ','
       << fmt12(r.metrics.l1) << ',' << fmt12(r.metrics.l2) << ',' << fmt12(r.metrics.linf) << ','
       << fmt12(r.metrics.max_step) << ',' << fmt12(r.solution.terminal_residual) << ','
       << r.solution.iterations << ',' << fmt12(r.wall_ms) << '\n';
    return os.str();
}

void write_run(const RunResult& run, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    for (const auto& r : run.results) {
        const fs::path dir = out_dir / run.config.label / method_name(r.method);
        fs::create_directories(dir);
        write_trajectory_csv(dir / "trajectory.csv", r.trajectory);
        write_metrics_json(dir / "metrics.json", run.config, r);
    }
    const fs::path summary = out_dir / "summary.csv";
    const bool fresh = !fs::exists(summary);
    std::ofstream out(summary, std::ios::binary | std::ios::app);
    if (fresh) out << summary_header();
    for (const auto& r : run.results) out << summary_row(run.config, r);
}

std::vector<RunResult> run_batch(const std::vector<ExperimentConfig>& configs, int jobs) {
    std::vector<RunResult> results(configs.size());
    if (jobs < 1) jobs = 1;
    jobs = std::min<int>(jobs, static_cast<int>(configs.size()));
    if (jobs == 1) {
        for (size_t i = 0; i < configs.size(); ++i) results[i] = run_case(configs[i]);
        return results;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(configs.size());
    workers.reserve(jobs);
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < configs.size(); i = next.fetch_add(1)) {
                try {
                    results[i] = run_case(configs[i]);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

TableOutput emit_table(const std::vector<std::filesystem::path>& run_dirs) {
    TableOutput out;
    out.csv = summary_header();
    struct Key {
        std::string case_label;
        int N;
        bool operator<(const Key& o) const {
            return std::tie(case_label, N) < std::tie(o.case_label, o.N);
        }
    };
    std::map<Key, DensityRow> table;

    for (const auto& dir : run_dirs) {
        std::ifstream in(dir / "summary.csv");
        if (!in) throw ConfigError("no summary.csv under " + dir.string());
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            if (first) {
                first = false;
                continue;  // header
            }
            if (line.empty()) continue;
            out.csv += line + "\n";
            std::stringstream ss(line);
            std::string case_no, method, N, lambda, density;
            std::getline(ss, case_no, ',');
            std::getline(ss, method, ',');
            std::getline(ss, N, ',');
            std::getline(ss, lambda, ',');
            std::getline(ss, density, ',');
            Key key{case_no == "0" ? dir.string() : "case " + case_no, std::stoi(N)};
            auto& row = table[key];
            row.label = key.case_label + " N=" + N;
            const double d = std::stod(density);
            if (method == "lasso") row.lasso = d;
            if (method == "en") row.en = d;
            if (method == "clot") row.clot = d;
        }
    }
    std::vector<DensityRow> rows;
    rows.reserve(table.size());
    for (auto& [k, row] : table) rows.push_back(row);
    out.text = format_density_table(rows);
    return out;
}

}  // namespace handsoff
