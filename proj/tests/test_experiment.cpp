#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "drql/errors.hpp"
#include "drql/experiment.hpp"
#include "support/models.hpp"
#include "support/oracles.hpp"

using namespace drql;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("drql_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

ExperimentConfig small_config(const fs::path& out) {
    ExperimentConfig c;
    c.trajectories = 3;
    c.iterations = 40;
    c.seed = 5;
    c.output_dir = out.string();
    return c;
}

void check_plot_inputs(const fs::path& script) {
    const auto files = plot_script_inputs(script.string());
    CHECK_FALSE(files.empty());
    for (const auto& f : files) {
        INFO(script.string() << " reads " << f);
        CHECK(fs::exists(script.parent_path() / f));
    }
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("config JSON round trip and validation") {
    ExperimentConfig c;
    c.environment.name = "inventory";
    c.environment.gamma = 0.8;
    c.delta = 0.5;
    c.g = 0.7;
    c.schedule = StepsizeSchedule::constant(0.01);
    c.gammas = {0.7, 0.8};
    c.deltas = {0.01, 0.1};
    c.g_values = {0.625, 0.499};
    c.checkpoints = {10, 20};
    c.seed = 99;
    const auto back = config_from_json(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
    CHECK(back.schedule.kind() == StepsizeSchedule::Kind::Constant);
    CHECK(back.schedule.alpha() == 0.01);

    auto bad = c;
    bad.g = 0.05;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = c;
    bad.trajectories = 0;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = c;
    bad.delta = -1.0;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = c;
    bad.environment.name = "file";
    bad.environment.model_file = "/nonexistent/model.json";
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = c;
    bad.environment.name = "maze";
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"schedule", {{"kind", "cosine"}}}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"iterations", "many"}}), std::invalid_argument);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), std::invalid_argument);
}

TEST_CASE("single trajectory of ten iterations writes eleven rows") {
    const auto dir = fresh_dir("eleven");
    auto c = small_config(dir);
    c.trajectories = 1;
    c.iterations = 10;
    const auto curves = cmd_run(c);
    REQUIRE(curves.size() == 1);
    CHECK_FALSE(curves[0].curve.has_value());
    const auto rows = lines(dir / "trajectories" / "traj_0000.csv");
    REQUIRE(rows.size() == 12);
    CHECK(rows[0] == "iteration,error,cumulative_draws");
    CHECK(rows[1].rfind("0,", 0) == 0);
    CHECK(rows[11].rfind("10,", 0) == 0);
    check_plot_inputs(dir / "convergence.gp");
    fs::remove_all(dir);
}

TEST_CASE("aggregate CSV golden header and content") {
    const auto dir = fresh_dir("aggregate");
    const auto curves = cmd_run(small_config(dir));
    const auto rows = lines(dir / "aggregate.csv");
    REQUIRE(rows.size() == 42);
    CHECK(rows[0] == "iteration,mean_error,stderr,mean_cum_draws");

    const auto curve = read_aggregate_csv((dir / "aggregate.csv").string());
    const auto& recs = curves[0].records;
    for (std::size_t k = 0; k <= 40; ++k) {
        double sum = 0.0;
        double draws = 0.0;
        for (const auto& r : recs) {
            sum += r.errors[k];
            draws += static_cast<double>(r.cumulative_draws[k]);
        }
        CHECK(curve.mean_error[k] == doctest::Approx(sum / 3.0).epsilon(1e-15));
        CHECK(curve.mean_cum_draws[k] == doctest::Approx(draws / 3.0).epsilon(1e-15));
    }
    // per-trajectory CSV values come back exactly
    const auto t1 = lines(dir / "trajectories" / "traj_0001.csv");
    REQUIRE(t1.size() == 42);
    std::istringstream row(t1[40]);
    std::string k;
    std::string err;
    std::getline(row, k, ',');
    std::getline(row, err, ',');
    CHECK(std::stod(err) == recs[1].errors[39]);
    fs::remove_all(dir);
}

TEST_CASE("rerun gives byte-identical files") {
    const auto a = fresh_dir("rerun_a");
    const auto b = fresh_dir("rerun_b");
    auto ca = small_config(a);
    ca.gammas = {0.7, 0.8};
    auto cb = ca;
    cb.output_dir = b.string();
    cb.workers = 2;
    cmd_run(ca);
    cmd_run(cb);
    // a warm cache must not change anything
    cmd_run(ca);
    for (const auto* name : {"gamma_0.7/aggregate.csv", "gamma_0.8/aggregate.csv", "gamma_0.7/qstar.json",
                             "gamma_0.8/trajectories/traj_0002.csv"}) {
        INFO(name);
        CHECK(slurp(a / name) == slurp(b / name));
        CHECK_FALSE(slurp(a / name).empty());
    }
    check_plot_inputs(a / "convergence.gp");
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("output directory from the environment") {
    const auto dir = fresh_dir("envdir");
    setenv(kOutputDirEnv, dir.string().c_str(), 1);
    auto c = small_config(dir);
    c.output_dir.clear();
    c.trajectories = 2;
    c.iterations = 5;
    const auto curves = cmd_run(c);
    unsetenv(kOutputDirEnv);
    CHECK(fs::exists(dir / "aggregate.csv"));
    CHECK(fs::exists(dir / "config.json"));
    fs::remove_all(dir);
}

TEST_CASE("Q* cache is keyed by model, delta and tolerance") {
    const auto dir = fresh_dir("cache");
    const auto model = make_hard_mdp({});
    const auto first = cached_q_star(model, 0.1, 1e-10, dir.string());
    const auto second = cached_q_star(model, 0.1, 1e-10, dir.string());
    CHECK(sup_distance(first.q, second.q) == 0.0);
    cached_q_star(model, 0.2, 1e-10, dir.string());
    cached_q_star(make_hard_mdp({0.8, std::nullopt}), 0.1, 1e-10, dir.string());
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
    CHECK(files == 3);
    fs::remove_all(dir);
}

TEST_CASE("qstar command output") {
    const auto dir = fresh_dir("qstar");
    const auto single = cmd_qstar(testing::single_state_model(1.0, 0.5), 0.1, 1e-12, (dir / "one.json").string());
    CHECK(single.solution.q(0, 0) == doctest::Approx(2.0).epsilon(1e-11));
    nlohmann::json doc;
    std::ifstream(dir / "one.json") >> doc;
    CHECK(doc["values"][0][0].get<double>() == doctest::Approx(2.0).epsilon(1e-11));

    const auto hard = make_hard_mdp({});
    cmd_qstar(hard, 0.0, 1e-10, (dir / "hard.json").string());
    nlohmann::json hard_doc;
    std::ifstream(dir / "hard.json") >> hard_doc;
    const QTable from_file = qtable_from_json(hard_doc);
    CHECK(sup_distance(from_file, testing::classical_value_iteration(hard, 2000)) <= 1e-9);

    const auto inv = cmd_qstar(make_inventory_mdp({}), 0.5, 1e-10, (dir / "inv.json").string());
    CHECK(inv.bound_holds);
    nlohmann::json inv_doc;
    std::ifstream(dir / "inv.json") >> inv_doc;
    CHECK(inv_doc["report"]["norm_bound_holds"].get<bool>());
    CHECK(inv_doc["report"]["norm_bound"].get<double>() == doctest::Approx(15.0 / 0.3));
    fs::remove_all(dir);
}

TEST_CASE("gamma regression on synthetic data") {
    std::vector<double> gammas;
    for (int j = 0; j < 10; ++j) gammas.push_back(0.7 + 0.25 * j / 9.0);
    const std::vector<std::int64_t> checkpoints{500, 1000, 1500};
    std::vector<std::vector<double>> errors;
    for (double g : gammas) {
        std::vector<double> row;
        for (auto k : checkpoints) row.push_back(3.0 / std::sqrt(double(k)) * std::pow(1.0 - g, -2.0));
        errors.push_back(row);
    }
    const auto rows = gamma_regression(gammas, checkpoints, errors);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(std::abs(r.fit.slope + 2.0) <= 1e-9);
        CHECK(r.fit.r_squared == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(gamma_regression({0.8, 0.8, 0.8, 0.8}, checkpoints,
                                     std::vector<std::vector<double>>(4, {1.0, 1.0, 1.0})),
                    std::invalid_argument);
}

TEST_CASE("gamma sweep needs four gammas and writes its summary") {
    const auto dir = fresh_dir("gamma_sweep");
    auto c = small_config(dir);
    c.gammas = {0.7, 0.8, 0.9};
    c.checkpoints = {10, 20};
    CHECK_THROWS_AS(cmd_gamma_sweep(c), std::invalid_argument);
    c.gammas = {0.7, 0.75, 0.8, 0.85};
    c.iterations = 20;
    const auto rows = cmd_gamma_sweep(c);
    CHECK(rows.size() == 2);
    const auto summary = lines(dir / "gamma_sweep.csv");
    REQUIRE(summary.size() == 3);
    CHECK(summary[0] == "checkpoint,slope,intercept,r_squared");
    check_plot_inputs(dir / "gamma_sweep.gp");
    fs::remove_all(dir);
}

TEST_CASE("delta sweep") {
    const auto dir = fresh_dir("delta_sweep");
    auto c = small_config(dir);
    c.deltas = {0.0, 0.05, 0.1};
    const auto curves = cmd_delta_sweep(c);
    CHECK(curves.size() == 3);
    CHECK(lines(dir / "delta_sweep.csv").size() == 4);
    check_plot_inputs(dir / "delta_sweep.gp");
    fs::remove_all(dir);
}

TEST_CASE("compare-g outputs and draw accounting") {
    const auto dir = fresh_dir("compare_g");
    auto c = small_config(dir);
    c.g_values = {0.999, 0.625};
    c.iterations = 1200;
    c.trajectories = 2;
    c.write_trajectories = false;
    const auto results = cmd_compare_g(c);
    REQUIRE(results.size() == 2);
    // 2 x 1200 x 8 calls; per-call sd at g = 0.999 is about 0.13
    CHECK(results[0].mean_draws_per_call == doctest::Approx(4.004).epsilon(0.01));
    CHECK(results[0].median_call_draws == 4);
    CHECK(fs::exists(dir / "comparison.csv"));
    CHECK(fs::exists(dir / "smoothed.csv"));
    CHECK(lines(dir / "draw_summary.csv").size() == 3);
    CHECK_FALSE(fs::exists(dir / "g_0.625" / "trajectories"));
    check_plot_inputs(dir / "compare_g.gp");
    auto empty = c;
    empty.g_values.clear();
    CHECK_THROWS_AS(cmd_compare_g(empty), std::invalid_argument);
    fs::remove_all(dir);
}

TEST_CASE("model file environments") {
    const auto dir = fresh_dir("model_file");
    const auto model = testing::random_model(3);
    save_model(model, (dir / "m.json").string());
    auto c = small_config(dir / "out");
    c.environment.name = "file";
    c.environment.model_file = (dir / "m.json").string();
    const auto curves = cmd_run(c);
    CHECK(curves[0].gamma == model.gamma());
    CHECK(model_hash(build_model(c.environment)) == model_hash(model));
    CHECK(build_model(c.environment, 0.5).gamma() == 0.5);
    fs::remove_all(dir);
}

TEST_CASE("IO errors") {
    CHECK_THROWS_AS(read_aggregate_csv("/nonexistent/aggregate.csv"), IoError);
    CHECK_THROWS_AS(plot_script_inputs("/nonexistent/plot.gp"), IoError);
    CHECK_THROWS_AS(write_aggregate_csv(AggregateCurve{}, "/proc/drql/aggregate.csv"), IoError);
}

}  // TEST_SUITE
