#include "drql/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "drql/errors.hpp"
#include "drql/mlmc.hpp"

namespace drql {

namespace fs = std::filesystem;

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string short_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

std::ofstream open_output(const std::string& path) {
    const fs::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory '" + p.parent_path().string() + "': " + ec.message());
        }
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write '" + path + "'");
    }
    return out;
}

std::string join(const std::string& dir, const std::string& name) {
    return dir.empty() ? name : (fs::path(dir) / name).string();
}

const char* schedule_name(StepsizeSchedule::Kind kind) {
    return kind == StepsizeSchedule::Kind::Constant ? "constant" : "rescaled-linear";
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& doc) {
    ExperimentConfig c;
    try {
        if (doc.contains("environment")) {
            const auto& e = doc.at("environment");
            if (e.contains("model_file")) {
                c.environment.name = "file";
                c.environment.model_file = e.at("model_file").get<std::string>();
            }
            if (e.contains("name")) {
                c.environment.name = e.at("name").get<std::string>();
            }
            if (e.contains("gamma")) {
                c.environment.gamma = e.at("gamma").get<double>();
            }
            if (e.contains("p")) {
                c.environment.p = e.at("p").get<double>();
            }
            auto& inv = c.environment.inventory;
            inv.n_s = e.value("n_s", inv.n_s);
            inv.n_a = e.value("n_a", inv.n_a);
            inv.n_d = e.value("n_d", inv.n_d);
            inv.order_cost = e.value("order_cost", inv.order_cost);
            inv.holding_cost = e.value("holding_cost", inv.holding_cost);
            inv.lost_sale_cost = e.value("lost_sale_cost", inv.lost_sale_cost);
            inv.demand = e.value("demand", inv.demand);
        }
        c.delta = doc.value("delta", c.delta);
        c.g = doc.value("g", c.g);
        if (doc.contains("schedule")) {
            const auto& s = doc.at("schedule");
            const std::string kind = s.value("kind", std::string("rescaled-linear"));
            if (kind == "constant") {
                c.schedule = StepsizeSchedule::constant(s.value("alpha", 0.008));
            } else if (kind == "rescaled-linear") {
                c.schedule = StepsizeSchedule::rescaled_linear(s.value("a", 1.0), s.value("b", 1.0));
            } else {
                throw std::invalid_argument("config: unknown schedule kind '" + kind + "'");
            }
        }
        c.trajectories = doc.value("trajectories", c.trajectories);
        c.iterations = doc.value("iterations", c.iterations);
        c.seed = doc.value("seed", c.seed);
        c.output_dir = doc.value("output_dir", c.output_dir);
        c.gammas = doc.value("gammas", c.gammas);
        c.deltas = doc.value("deltas", c.deltas);
        c.g_values = doc.value("g_values", c.g_values);
        c.checkpoints = doc.value("checkpoints", c.checkpoints);
        c.oracle_tol = doc.value("oracle_tol", c.oracle_tol);
        c.workers = doc.value("workers", c.workers);
        c.write_trajectories = doc.value("write_trajectories", c.write_trajectories);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json env;
    env["name"] = c.environment.name;
    if (c.environment.gamma) {
        env["gamma"] = *c.environment.gamma;
    }
    if (c.environment.p) {
        env["p"] = *c.environment.p;
    }
    if (c.environment.name == "file") {
        env["model_file"] = c.environment.model_file;
    }
    if (c.environment.name == "inventory") {
        const auto& inv = c.environment.inventory;
        env["n_s"] = inv.n_s;
        env["n_a"] = inv.n_a;
        env["n_d"] = inv.n_d;
        env["order_cost"] = inv.order_cost;
        env["holding_cost"] = inv.holding_cost;
        env["lost_sale_cost"] = inv.lost_sale_cost;
        if (!inv.demand.empty()) {
            env["demand"] = inv.demand;
        }
    }
    nlohmann::json schedule;
    schedule["kind"] = schedule_name(c.schedule.kind());
    if (c.schedule.kind() == StepsizeSchedule::Kind::Constant) {
        schedule["alpha"] = c.schedule.alpha();
    } else {
        schedule["a"] = c.schedule.a();
        schedule["b"] = c.schedule.b();
    }
    return {{"environment", env},           {"delta", c.delta},
            {"g", c.g},                     {"schedule", schedule},
            {"trajectories", c.trajectories}, {"iterations", c.iterations},
            {"seed", c.seed},               {"output_dir", c.output_dir},
            {"gammas", c.gammas},           {"deltas", c.deltas},
            {"g_values", c.g_values},       {"checkpoints", c.checkpoints},
            {"oracle_tol", c.oracle_tol},   {"workers", c.workers},
            {"write_trajectories", c.write_trajectories}};
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("config file '" + path + "' does not exist or is unreadable");
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config file '" + path + "': " + e.what());
    }
    return config_from_json(doc);
}

void validate_config(const ExperimentConfig& c) {
    const auto& env = c.environment;
    if (env.name != "hard" && env.name != "inventory" && env.name != "file") {
        throw std::invalid_argument("config: environment must be 'hard', 'inventory' or 'file'");
    }
    if (env.name == "file" && !fs::exists(env.model_file)) {
        throw std::invalid_argument("config: model file '" + env.model_file + "' does not exist");
    }
    if (!(c.delta >= 0.0) || !std::isfinite(c.delta)) {
        throw std::invalid_argument("config: delta must be finite and >= 0");
    }
    for (double d : c.deltas) {
        if (!(d >= 0.0) || !std::isfinite(d)) {
            throw std::invalid_argument("config: every delta must be finite and >= 0");
        }
    }
    if (!(c.g > kMinLevelParameter && c.g < 1.0)) {
        throw std::invalid_argument("config: g must lie in (0.05, 1)");
    }
    for (double g : c.g_values) {
        if (!(g > kMinLevelParameter && g < 1.0)) {
            throw std::invalid_argument("config: every g must lie in (0.05, 1)");
        }
    }
    for (double gamma : c.gammas) {
        if (!(gamma > 0.0 && gamma < 1.0)) {
            throw std::invalid_argument("config: every gamma must lie in (0, 1)");
        }
    }
    if (c.trajectories < 1) {
        throw std::invalid_argument("config: trajectories must be >= 1");
    }
    if (c.iterations < 1) {
        throw std::invalid_argument("config: iterations must be >= 1");
    }
    if (!(c.oracle_tol > 0.0)) {
        throw std::invalid_argument("config: oracle_tol must be > 0");
    }
    for (auto k : c.checkpoints) {
        if (k < 1) {
            throw std::invalid_argument("config: checkpoints must be >= 1");
        }
    }
}

MdpModel build_model(const EnvironmentSpec& env, std::optional<double> gamma) {
    if (env.name == "hard") {
        HardMdpParams params;
        params.gamma = gamma.value_or(env.gamma.value_or(0.7));
        params.p = env.p;
        return make_hard_mdp(params);
    }
    if (env.name == "inventory") {
        InventoryParams params = env.inventory;
        params.gamma = gamma.value_or(env.gamma.value_or(0.7));
        return make_inventory_mdp(params);
    }
    if (env.name == "file") {
        MdpModel model = load_model(env.model_file);
        const auto override_gamma = gamma ? gamma : env.gamma;
        if (!override_gamma) {
            return model;
        }
        auto doc = model_to_json(model);
        doc["gamma"] = *override_gamma;
        return model_from_json(doc);
    }
    throw std::invalid_argument("unknown environment '" + env.name + "'");
}

std::string default_cache_dir(const ExperimentConfig& config) {
    if (const char* env = std::getenv(kCacheDirEnv)) {
        return env;
    }
    return join(config.output_dir, "qstar_cache");
}

FixedPointResult cached_q_star(const MdpModel& model, double delta, double tol, const std::string& cache_dir) {
    std::string path;
    if (!cache_dir.empty()) {
        char name[128];
        std::snprintf(name, sizeof name, "qstar_%016llx_%s_%s.json",
                      static_cast<unsigned long long>(model_hash(model)), num(delta).c_str(), num(tol).c_str());
        path = join(cache_dir, name);
        std::ifstream in(path);
        if (in) {
            try {
                nlohmann::json doc;
                in >> doc;
                FixedPointResult cached{qtable_from_json(doc.at("q")), {}};
                cached.report.iterations = doc.at("iterations").get<int>();
                cached.report.final_residual = doc.at("final_residual").get<double>();
                if (cached.q.n_states() == model.n_states() && cached.q.n_actions() == model.n_actions()) {
                    return cached;
                }
            } catch (const std::exception&) {
                // unreadable cache entries are recomputed and overwritten
            }
        }
    }
    FixedPointResult result = solve_q_star(model, delta, tol);
    if (!path.empty()) {
        auto out = open_output(path);
        nlohmann::json doc{{"q", qtable_to_json(result.q)},
                           {"iterations", result.report.iterations},
                           {"final_residual", result.report.final_residual}};
        out << doc.dump() << '\n';
    }
    return result;
}

BatchResult run_batch(const ExperimentConfig& config, std::optional<double> gamma) {
    validate_config(config);
    MdpModel model = build_model(config.environment, gamma);
    FixedPointResult oracle = cached_q_star(model, config.delta, config.oracle_tol, default_cache_dir(config));
    BatchOptions options;
    options.run.delta = config.delta;
    options.run.g = config.g;
    options.run.schedule = config.schedule;
    options.run.iterations = config.iterations;
    options.trajectories = config.trajectories;
    options.seed = config.seed;
    options.workers = config.workers;
    auto records = run_batch(model, options, &oracle.q);
    return {std::move(model), std::move(oracle.q), std::move(records)};
}

void write_trajectory_csv(const TrajectoryRecord& record, const std::string& path) {
    auto out = open_output(path);
    out << "iteration,error,cumulative_draws\n";
    for (std::size_t k = 0; k < record.cumulative_draws.size(); ++k) {
        out << k << ',' << (record.errors.empty() ? std::string("nan") : num(record.errors[k])) << ','
            << record.cumulative_draws[k] << '\n';
    }
}

void write_aggregate_csv(const AggregateCurve& curve, const std::string& path) {
    auto out = open_output(path);
    out << "iteration,mean_error,stderr,mean_cum_draws\n";
    for (std::size_t k = 0; k < curve.size(); ++k) {
        out << k << ',' << num(curve.mean_error[k]) << ',' << num(curve.stderr_error[k]) << ','
            << num(curve.mean_cum_draws[k]) << '\n';
    }
}

AggregateCurve read_aggregate_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    std::string line;
    std::getline(in, line);
    if (line != "iteration,mean_error,stderr,mean_cum_draws") {
        throw IoError("'" + path + "' is not an aggregate CSV");
    }
    AggregateCurve curve;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string field;
        std::vector<double> cells;
        while (std::getline(row, field, ',')) {
            cells.push_back(std::stod(field));
        }
        if (cells.size() != 4) {
            throw IoError("malformed row in '" + path + "'");
        }
        curve.mean_error.push_back(cells[1]);
        curve.stderr_error.push_back(cells[2]);
        curve.mean_cum_draws.push_back(cells[3]);
    }
    return curve;
}

QStarSummary cmd_qstar(const MdpModel& model, double delta, double tol, const std::string& out_path) {
    QStarSummary summary{solve_q_star(model, delta, tol), 0.0, 0.0, false};
    summary.norm = sup_norm(summary.solution.q);
    summary.norm_bound = model.r_max() / (1.0 - model.gamma());
    summary.bound_holds = summary.norm <= summary.norm_bound + 1e-9;

    nlohmann::json doc = qtable_to_json(summary.solution.q);
    doc["delta"] = delta;
    doc["tol"] = tol;
    doc["gamma"] = model.gamma();
    doc["greedy_policy"] = greedy_policy(summary.solution.q);
    doc["report"] = {{"iterations", summary.solution.report.iterations},
                     {"final_residual", summary.solution.report.final_residual},
                     {"contraction_ratios", summary.solution.report.contraction_ratios},
                     {"sup_norm", summary.norm},
                     {"norm_bound", summary.norm_bound},
                     {"norm_bound_holds", summary.bound_holds}};
    auto out = open_output(out_path);
    out << doc.dump(2) << '\n';
    return summary;
}

namespace {

std::string data_file_for(const CurveOutput& c, const std::string& root) {
    const std::string name = c.curve ? "aggregate.csv" : "trajectories/traj_0000.csv";
    return fs::relative(fs::path(c.directory) / name, root.empty() ? fs::path(".") : fs::path(root)).generic_string();
}

// Runs one batch into `directory` and writes its CSVs.
CurveOutput run_one(const ExperimentConfig& config, const std::string& label, std::optional<double> gamma,
                    const std::string& directory) {
    BatchResult batch = run_batch(config, gamma);
    CurveOutput out{label, batch.model.gamma(), config.delta, config.g, directory, std::nullopt, {}};
    if (config.write_trajectories || config.trajectories == 1) {
        for (std::size_t i = 0; i < batch.records.size(); ++i) {
            char name[64];
            std::snprintf(name, sizeof name, "traj_%04zu.csv", i);
            write_trajectory_csv(batch.records[i], join(join(directory, "trajectories"), name));
        }
    }
    if (batch.records.size() >= 2) {
        out.curve = aggregate(batch.records);
        write_aggregate_csv(*out.curve, join(directory, "aggregate.csv"));
    }
    {
        auto q_out = open_output(join(directory, "qstar.json"));
        q_out << qtable_to_json(batch.q_star).dump(2) << '\n';
    }
    out.records = std::move(batch.records);
    return out;
}

void write_convergence_plot(const std::vector<CurveOutput>& curves, const ExperimentConfig& config,
                            const std::string& root, const std::string& script_name, const std::string& image_name) {
    auto out = open_output(join(root, script_name));
    const bool loglog = config.schedule.kind() == StepsizeSchedule::Kind::RescaledLinear;
    out << "# gnuplot script; run from this directory: gnuplot " << script_name << "\n";
    out << "set terminal pngcairo size 900,600\n";
    out << "set output '" << image_name << "'\n";
    out << "set datafile separator ','\n";
    out << (loglog ? "set logscale xy 10\n" : "set logscale y 10\n");
    out << "set xlabel 'iteration k'\n";
    out << "set ylabel 'mean sup-norm error'\n";
    out << "set key top right\n";
    std::vector<std::string> terms;
    double anchor = 0.0;
    for (const auto& c : curves) {
        const std::string file = data_file_for(c, root);
        terms.push_back("'" + file + "' skip 2 using 1:2 with lines title '" + c.label + "'");
        if (anchor == 0.0) {
            if (c.curve && c.curve->size() > 1) {
                anchor = c.curve->mean_error[1];
            } else if (!c.records.empty() && c.records.front().errors.size() > 1) {
                anchor = c.records.front().errors[1];
            }
        }
    }
    if (loglog && anchor > 0.0) {
        out << "ref(x) = " << num(anchor) << " * x**(-0.5)\n";
        terms.push_back("ref(x) with lines dashtype 2 title 'slope -1/2'");
    }
    out << "plot ";
    for (std::size_t i = 0; i < terms.size(); ++i) {
        out << (i ? ", \\\n     " : "") << terms[i];
    }
    out << '\n';
}

std::string output_root(const ExperimentConfig& config) {
    if (!config.output_dir.empty()) {
        return config.output_dir;
    }
    if (const char* env = std::getenv(kOutputDirEnv)) {
        return env;
    }
    return "drql_out";
}

}  // namespace

std::vector<CurveOutput> cmd_run(const ExperimentConfig& input) {
    ExperimentConfig config = input;
    config.output_dir = output_root(input);
    validate_config(config);
    std::vector<CurveOutput> curves;
    if (config.gammas.empty()) {
        const MdpModel probe = build_model(config.environment);
        curves.push_back(run_one(config, "gamma=" + short_num(probe.gamma()), std::nullopt, config.output_dir));
    } else {
        for (double gamma : config.gammas) {
            curves.push_back(run_one(config, "gamma=" + short_num(gamma), gamma,
                                     join(config.output_dir, "gamma_" + short_num(gamma))));
        }
    }
    write_convergence_plot(curves, config, config.output_dir, "convergence.gp", "convergence.png");
    auto cfg_out = open_output(join(config.output_dir, "config.json"));
    cfg_out << config_to_json(config).dump(2) << '\n';
    return curves;
}

std::vector<GammaRegressionRow> gamma_regression(const std::vector<double>& gammas,
                                                 const std::vector<std::int64_t>& checkpoints,
                                                 const std::vector<std::vector<double>>& errors) {
    if (errors.size() != gammas.size()) {
        throw std::invalid_argument("gamma_regression: one error row per gamma required");
    }
    std::vector<double> x;
    for (double gamma : gammas) {
        x.push_back(std::log10(1.0 - gamma));
    }
    std::vector<GammaRegressionRow> rows;
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        std::vector<double> y;
        for (const auto& row : errors) {
            if (row.size() != checkpoints.size()) {
                throw std::invalid_argument("gamma_regression: error row has the wrong length");
            }
            y.push_back(std::log10(row[c]));
        }
        rows.push_back({checkpoints[c], least_squares(x, y)});
    }
    return rows;
}

std::vector<GammaRegressionRow> cmd_gamma_sweep(const ExperimentConfig& input) {
    if (input.gammas.size() < 4) {
        throw std::invalid_argument("gamma-sweep: needs at least four gamma values");
    }
    if (input.checkpoints.empty()) {
        throw std::invalid_argument("gamma-sweep: needs at least one checkpoint");
    }
    if (input.trajectories < 2) {
        throw std::invalid_argument("gamma-sweep: needs at least two trajectories");
    }
    ExperimentConfig config = input;
    config.output_dir = output_root(input);
    config.iterations = *std::max_element(config.checkpoints.begin(), config.checkpoints.end());
    validate_config(config);

    std::vector<std::vector<double>> errors;
    for (double gamma : config.gammas) {
        CurveOutput c = run_one(config, "gamma=" + short_num(gamma), gamma,
                                join(config.output_dir, "gamma_" + short_num(gamma)));
        std::vector<double> row;
        for (auto k : config.checkpoints) {
            row.push_back(c.curve->mean_error[static_cast<std::size_t>(k)]);
        }
        errors.push_back(std::move(row));
    }
    auto rows = gamma_regression(config.gammas, config.checkpoints, errors);

    {
        auto out = open_output(join(config.output_dir, "gamma_sweep.csv"));
        out << "checkpoint,slope,intercept,r_squared\n";
        for (const auto& r : rows) {
            out << r.checkpoint << ',' << num(r.fit.slope) << ',' << num(r.fit.intercept) << ','
                << num(r.fit.r_squared) << '\n';
        }
    }
    {
        auto out = open_output(join(config.output_dir, "gamma_points.csv"));
        out << "checkpoint,gamma,lg_one_minus_gamma,mean_error,lg_mean_error\n";
        for (std::size_t c = 0; c < config.checkpoints.size(); ++c) {
            for (std::size_t j = 0; j < config.gammas.size(); ++j) {
                out << config.checkpoints[c] << ',' << num(config.gammas[j]) << ','
                    << num(std::log10(1.0 - config.gammas[j])) << ',' << num(errors[j][c]) << ','
                    << num(std::log10(errors[j][c])) << '\n';
            }
        }
    }
    {
        auto out = open_output(join(config.output_dir, "gamma_sweep.gp"));
        out << "# gnuplot script; run from this directory: gnuplot gamma_sweep.gp\n";
        out << "set terminal pngcairo size 900,600\n";
        out << "set output 'gamma_sweep.png'\n";
        out << "set datafile separator ','\n";
        out << "set xlabel 'lg(1 - gamma)'\nset ylabel 'lg(mean error)'\n";
        out << "plot ";
        for (std::size_t c = 0; c < rows.size(); ++c) {
            const auto k = rows[c].checkpoint;
            out << (c ? ", \\\n     " : "") << "'gamma_points.csv' skip 1 using ($1 == " << k
                << " ? $3 : 1/0):5 with points title 'k = " << k << "', \\\n     " << num(rows[c].fit.slope)
                << " * x + " << num(rows[c].fit.intercept) << " with lines title 'slope " << short_num(rows[c].fit.slope)
                << "'";
        }
        out << '\n';
    }
    auto cfg_out = open_output(join(config.output_dir, "config.json"));
    cfg_out << config_to_json(config).dump(2) << '\n';
    return rows;
}

std::vector<CurveOutput> cmd_delta_sweep(const ExperimentConfig& input) {
    if (input.deltas.empty()) {
        throw std::invalid_argument("delta-sweep: needs at least one delta");
    }
    ExperimentConfig config = input;
    config.output_dir = output_root(input);
    validate_config(config);
    std::vector<CurveOutput> curves;
    for (double delta : config.deltas) {
        ExperimentConfig one = config;
        one.delta = delta;
        curves.push_back(run_one(one, "delta=" + short_num(delta), std::nullopt,
                                 join(config.output_dir, "delta_" + short_num(delta))));
    }
    {
        auto out = open_output(join(config.output_dir, "delta_sweep.csv"));
        out << "delta,final_iteration,mean_error,stderr\n";
        for (const auto& c : curves) {
            const std::size_t last = c.records.front().errors.size() - 1;
            const double err = c.curve ? c.curve->mean_error[last] : c.records.front().errors[last];
            const double se = c.curve ? c.curve->stderr_error[last] : 0.0;
            out << num(c.delta) << ',' << last << ',' << num(err) << ',' << num(se) << '\n';
        }
    }
    write_convergence_plot(curves, config, config.output_dir, "delta_sweep.gp", "delta_sweep.png");
    auto cfg_out = open_output(join(config.output_dir, "config.json"));
    cfg_out << config_to_json(config).dump(2) << '\n';
    return curves;
}

std::vector<GComparison> cmd_compare_g(const ExperimentConfig& input) {
    if (input.g_values.empty()) {
        throw std::invalid_argument("compare-g: needs at least one g value");
    }
    ExperimentConfig config = input;
    config.output_dir = output_root(input);
    validate_config(config);

    std::vector<GComparison> results;
    for (double g : config.g_values) {
        ExperimentConfig one = config;
        one.g = g;
        CurveOutput c = run_one(one, "g=" + short_num(g), std::nullopt, join(config.output_dir, "g_" + short_num(g)));
        std::map<std::uint64_t, std::uint64_t> calls;
        for (const auto& r : c.records) {
            for (const auto& [draws, count] : r.call_draws) {
                calls[draws] += count;
            }
        }
        double total_draws = 0.0;
        double total_calls = 0.0;
        for (const auto& [draws, count] : calls) {
            total_draws += static_cast<double>(draws) * static_cast<double>(count);
            total_calls += static_cast<double>(count);
        }
        results.push_back({g, std::move(c), total_draws / total_calls, histogram_median(calls), calls.rbegin()->first});
    }

    const std::size_t first = std::min<std::size_t>(1000, static_cast<std::size_t>(config.iterations));
    {
        auto out = open_output(join(config.output_dir, "comparison.csv"));
        out << "g,iteration,mean_cum_draws,mean_error,lg_mean_cum_draws,lg_mean_error\n";
        for (const auto& r : results) {
            const auto& curve = r.output.curve;
            const auto& rec = r.output.records.front();
            for (std::size_t k = first; k < rec.errors.size(); ++k) {
                const double draws = curve ? curve->mean_cum_draws[k] : static_cast<double>(rec.cumulative_draws[k]);
                const double err = curve ? curve->mean_error[k] : rec.errors[k];
                out << num(r.g) << ',' << k << ',' << num(draws) << ',' << num(err) << ',' << num(std::log10(draws))
                    << ',' << num(std::log10(err)) << '\n';
            }
        }
    }
    {
        auto out = open_output(join(config.output_dir, "smoothed.csv"));
        out << "g,lg_error,smoothed_draws\n";
        for (const auto& r : results) {
            std::vector<double> lg_errors;
            std::vector<double> draws;
            for (const auto& rec : r.output.records) {
                for (std::size_t k = first; k < rec.errors.size(); ++k) {
                    lg_errors.push_back(std::log10(rec.errors[k]));
                    draws.push_back(static_cast<double>(rec.cumulative_draws[k]));
                }
            }
            for (const auto& p : smooth_by_error(lg_errors, draws, 1e-4)) {
                out << num(r.g) << ',' << num(p.lg_error) << ',' << num(p.mean_draws) << '\n';
            }
        }
    }
    {
        auto out = open_output(join(config.output_dir, "draw_summary.csv"));
        out << "g,expected_draws_per_call,mean_draws_per_call,median_call_draws,max_call_draws\n";
        for (const auto& r : results) {
            out << num(r.g) << ',' << num(expected_draws_per_call(r.g)) << ',' << num(r.mean_draws_per_call) << ','
                << r.median_call_draws << ',' << r.max_call_draws << '\n';
        }
    }
    {
        auto out = open_output(join(config.output_dir, "compare_g.gp"));
        out << "# gnuplot script; run from this directory: gnuplot compare_g.gp\n";
        out << "set terminal pngcairo size 1200,500\n";
        out << "set output 'compare_g.png'\n";
        out << "set datafile separator ','\n";
        out << "set multiplot layout 1,2\n";
        out << "set xlabel 'lg(mean cumulative samples)'\nset ylabel 'lg(mean error)'\n";
        out << "plot ";
        for (std::size_t i = 0; i < results.size(); ++i) {
            out << (i ? ", \\\n     " : "") << "'comparison.csv' skip 1 using ($1 == " << num(results[i].g)
                << " ? $5 : 1/0):6 with lines title 'g = " << short_num(results[i].g) << "'";
        }
        out << "\nset xlabel 'lg(error)'\nset ylabel 'smoothed samples'\n";
        out << "plot ";
        for (std::size_t i = 0; i < results.size(); ++i) {
            out << (i ? ", \\\n     " : "") << "'smoothed.csv' skip 1 using ($1 == " << num(results[i].g)
                << " ? $2 : 1/0):3 with lines title 'g = " << short_num(results[i].g) << "'";
        }
        out << "\nunset multiplot\n";
    }
    auto cfg_out = open_output(join(config.output_dir, "config.json"));
    cfg_out << config_to_json(config).dump(2) << '\n';
    return results;
}

std::vector<std::string> plot_script_inputs(const std::string& script_path) {
    std::ifstream in(script_path);
    if (!in) {
        throw IoError("cannot open '" + script_path + "'");
    }
    std::vector<std::string> files;
    const std::regex quoted("'([^']+\\.csv)'");
    std::string line;
    while (std::getline(in, line)) {
        for (std::sregex_iterator it(line.begin(), line.end(), quoted), end; it != end; ++it) {
            files.push_back((*it)[1].str());
        }
    }
    return files;
}

}  // namespace drql
