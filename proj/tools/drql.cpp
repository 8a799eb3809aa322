// drql: command-line front end for robust Q-learning experiments.
//
// Exit codes: 0 success, 1 configuration error, 2 numeric failure, 3 IO error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "drql/errors.hpp"
#include "drql/experiment.hpp"
#include "drql/mlmc.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kNumericError = 2, kIoError = 3 };

struct Overrides {
    std::string config_path;
    std::string env;
    std::string model;
    std::optional<double> gamma;
    std::optional<double> p;
    std::optional<double> delta;
    std::optional<double> g;
    std::string schedule;
    std::optional<double> alpha;
    std::optional<double> a;
    std::optional<double> b;
    std::optional<std::int64_t> trajectories;
    std::optional<std::int64_t> iterations;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::vector<double> gammas;
    std::vector<double> deltas;
    std::vector<double> g_values;
    std::vector<std::int64_t> checkpoints;
    std::optional<double> oracle_tol;
    std::optional<unsigned> workers;
    bool no_trajectory_csv = false;
};

void add_model_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--env", o.env, "Built-in environment: hard | inventory");
    cmd->add_option("--model", o.model, "Model JSON file (overrides --env)");
    cmd->add_option("--gamma", o.gamma, "Discount factor");
    cmd->add_option("--p", o.p, "Hard-MDP transition parameter (default (4 gamma - 1) / (3 gamma))");
}

void add_run_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "Experiment config JSON; flags override its keys");
    add_model_options(cmd, o);
    cmd->add_option("--delta", o.delta, "KL radius");
    cmd->add_option("--g", o.g, "Geometric level parameter");
    cmd->add_option("--schedule", o.schedule, "Stepsize: constant | rescaled-linear");
    cmd->add_option("--alpha", o.alpha, "Constant stepsize");
    cmd->add_option("--a", o.a, "Rescaled-linear numerator");
    cmd->add_option("--b", o.b, "Rescaled-linear offset");
    cmd->add_option("--trajectories", o.trajectories, "Independent trajectories");
    cmd->add_option("--iterations", o.iterations, "Iterations per trajectory");
    cmd->add_option("--seed", o.seed, "Base seed");
    cmd->add_option("--out", o.out, "Output directory (default $DRQL_OUTPUT_DIR or ./drql_out)");
    cmd->add_option("--gammas", o.gammas, "Discount factors to sweep")->delimiter(',');
    cmd->add_option("--deltas", o.deltas, "KL radii to sweep")->delimiter(',');
    cmd->add_option("--g-values", o.g_values, "Level parameters to compare")->delimiter(',');
    cmd->add_option("--checkpoints", o.checkpoints, "Iterations for the gamma regression")->delimiter(',');
    cmd->add_option("--oracle-tol", o.oracle_tol, "Tolerance of the ground-truth Q*");
    cmd->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
    cmd->add_flag("--no-trajectory-csv", o.no_trajectory_csv, "Skip per-trajectory CSV files");
}

drql::ExperimentConfig resolve_config(const Overrides& o) {
    drql::ExperimentConfig c = o.config_path.empty() ? drql::ExperimentConfig{} : drql::load_config(o.config_path);
    if (!o.env.empty()) {
        c.environment.name = o.env;
    }
    if (!o.model.empty()) {
        c.environment.name = "file";
        c.environment.model_file = o.model;
    }
    if (o.gamma) c.environment.gamma = o.gamma;
    if (o.p) c.environment.p = o.p;
    if (o.delta) c.delta = *o.delta;
    if (o.g) c.g = *o.g;
    const std::string kind = !o.schedule.empty()              ? o.schedule
                             : c.schedule.kind() == drql::StepsizeSchedule::Kind::Constant ? "constant"
                                                                                            : "rescaled-linear";
    if (kind == "constant") {
        const double alpha = o.alpha.value_or(
            c.schedule.kind() == drql::StepsizeSchedule::Kind::Constant ? c.schedule.alpha() : 0.008);
        c.schedule = drql::StepsizeSchedule::constant(alpha);
    } else if (kind == "rescaled-linear") {
        const bool was_linear = c.schedule.kind() == drql::StepsizeSchedule::Kind::RescaledLinear;
        c.schedule = drql::StepsizeSchedule::rescaled_linear(o.a.value_or(was_linear ? c.schedule.a() : 1.0),
                                                             o.b.value_or(was_linear ? c.schedule.b() : 1.0));
    } else {
        throw std::invalid_argument("unknown schedule '" + kind + "'");
    }
    if (o.trajectories) c.trajectories = *o.trajectories;
    if (o.iterations) c.iterations = *o.iterations;
    if (o.seed) c.seed = *o.seed;
    if (!o.out.empty()) c.output_dir = o.out;
    if (!o.gammas.empty()) c.gammas = o.gammas;
    if (!o.deltas.empty()) c.deltas = o.deltas;
    if (!o.g_values.empty()) c.g_values = o.g_values;
    if (!o.checkpoints.empty()) c.checkpoints = o.checkpoints;
    if (o.oracle_tol) c.oracle_tol = *o.oracle_tol;
    if (o.workers) c.workers = *o.workers;
    if (o.no_trajectory_csv) c.write_trajectories = false;
    return c;
}

void print_curves(const std::vector<drql::CurveOutput>& curves) {
    for (const auto& c : curves) {
        const auto& rec = c.records.front();
        const std::size_t last = rec.errors.size() - 1;
        const double err = c.curve ? c.curve->mean_error[last] : rec.errors[last];
        std::printf("%-14s  final mean error %.6g  -> %s\n", c.label.c_str(), err, c.directory.c_str());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributionally robust Q-learning with unbiased MLMC Bellman estimates"};
    app.require_subcommand(1);

    Overrides o;
    double q_delta = 0.1;
    double q_tol = 1e-10;
    std::string q_out = "qstar.json";
    auto* qstar = app.add_subcommand("qstar", "Solve Q* by robust value iteration");
    add_model_options(qstar, o);
    qstar->add_option("--delta", q_delta, "KL radius");
    qstar->add_option("--tol", q_tol, "Certified sup-norm accuracy");
    qstar->add_option("--out", q_out, "Output JSON path");

    auto* run = app.add_subcommand("run", "Run a batch of trajectories");
    add_run_options(run, o);
    auto* gamma_sweep = app.add_subcommand("gamma-sweep", "Regress error on 1 - gamma at fixed iterations");
    add_run_options(gamma_sweep, o);
    auto* delta_sweep = app.add_subcommand("delta-sweep", "Run one batch per KL radius");
    add_run_options(delta_sweep, o);
    auto* compare_g = app.add_subcommand("compare-g", "Compare level parameters g at equal budgets");
    add_run_options(compare_g, o);

    double v_delta = 0.1;
    auto* validate = app.add_subcommand("validate-model", "Check a model file and report its support statistics");
    validate->add_option("model", o.model, "Model JSON file")->required();
    validate->add_option("--delta", v_delta, "KL radius for the support-size check");
    std::string emit_out;
    validate->add_option("--emit", emit_out, "Also write the normalized model JSON here");

    auto* export_model = app.add_subcommand("export-model", "Write a built-in environment as model JSON");
    add_model_options(export_model, o);
    std::string export_out = "model.json";
    export_model->add_option("--out", export_out, "Output JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (qstar->parsed() || export_model->parsed()) {
            drql::EnvironmentSpec env;
            if (!o.env.empty()) env.name = o.env;
            if (!o.model.empty()) {
                env.name = "file";
                env.model_file = o.model;
            }
            env.gamma = o.gamma;
            env.p = o.p;
            const drql::MdpModel model = drql::build_model(env);
            if (export_model->parsed()) {
                drql::save_model(model, export_out);
                std::printf("wrote %s\n", export_out.c_str());
                return kOk;
            }
            const auto summary = drql::cmd_qstar(model, q_delta, q_tol, q_out);
            std::printf("Q* in %d sweeps, residual %.3g, ||Q*|| = %.10g <= r_max/(1-gamma) = %.10g: %s\n",
                        summary.solution.report.iterations, summary.solution.report.final_residual, summary.norm,
                        summary.norm_bound, summary.bound_holds ? "yes" : "NO");
            std::printf("wrote %s\n", q_out.c_str());
            return summary.bound_holds ? kOk : kNumericError;
        }
        if (validate->parsed()) {
            const drql::MdpModel model = drql::load_model(o.model);
            const double p_min = drql::min_support_probability(model);
            std::printf("states %lld, actions %lld, feasible pairs %zu, gamma %g, r_max %g\n",
                        static_cast<long long>(model.n_states()), static_cast<long long>(model.n_actions()),
                        model.feasible_pairs().size(), model.gamma(), model.r_max());
            std::printf("min support probability %.10g\n", p_min);
            if (v_delta > 0.0) {
                const auto rep = drql::check_support_condition(p_min, v_delta);
                std::printf("p_min/2 = %.6g %s 1 - exp(-delta) = %.6g (support-size condition %s)\n", rep.lhs,
                            rep.holds ? ">=" : "<", rep.rhs, rep.holds ? "holds" : "violated");
            }
            if (!emit_out.empty()) {
                drql::save_model(model, emit_out);
            }
            return kOk;
        }

        const drql::ExperimentConfig config = resolve_config(o);
        if (run->parsed()) {
            print_curves(drql::cmd_run(config));
        } else if (gamma_sweep->parsed()) {
            for (const auto& row : drql::cmd_gamma_sweep(config)) {
                std::printf("k = %lld: slope %.4f, intercept %.4f, R^2 %.4f\n", static_cast<long long>(row.checkpoint),
                            row.fit.slope, row.fit.intercept, row.fit.r_squared);
            }
        } else if (delta_sweep->parsed()) {
            print_curves(drql::cmd_delta_sweep(config));
        } else if (compare_g->parsed()) {
            for (const auto& r : drql::cmd_compare_g(config)) {
                std::printf("g = %g: mean draws per call %.4f (expected %.4f), median %llu, max %llu\n", r.g,
                            r.mean_draws_per_call, drql::expected_draws_per_call(r.g),
                            static_cast<unsigned long long>(r.median_call_draws),
                            static_cast<unsigned long long>(r.max_call_draws));
            }
        }
        return kOk;
    } catch (const drql::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kIoError;
    } catch (const drql::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kNumericError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumericError;
    }
}
