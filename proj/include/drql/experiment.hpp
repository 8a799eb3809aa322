#ifndef DRQL_EXPERIMENT_HPP
#define DRQL_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drql/dr_oracle.hpp"
#include "drql/environments.hpp"
#include "drql/q_learning.hpp"
#include "drql/stats.hpp"

namespace drql {

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "DRQL_OUTPUT_DIR";
/// Environment variable overriding the Q* cache directory.
inline constexpr const char* kCacheDirEnv = "DRQL_CACHE_DIR";

/// "hard" and "inventory" are built in; "file" loads `model_file`.
struct EnvironmentSpec {
    std::string name = "hard";
    std::optional<double> gamma;
    std::optional<double> p;
    InventoryParams inventory;
    std::string model_file;
};

struct ExperimentConfig {
    EnvironmentSpec environment;
    double delta = 0.1;
    double g = 0.625;
    StepsizeSchedule schedule = StepsizeSchedule::rescaled_linear();
    std::int64_t trajectories = 50;
    std::int64_t iterations = 5000;
    std::uint64_t seed = 1;
    std::string output_dir;
    std::vector<double> gammas;
    std::vector<double> deltas;
    std::vector<double> g_values;
    std::vector<std::int64_t> checkpoints{500, 1000, 1500};
    double oracle_tol = 1e-10;
    unsigned workers = 0;
    bool write_trajectories = true;
};

ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

/// Throws std::invalid_argument on out-of-range fields or missing files.
void validate_config(const ExperimentConfig& config);

/// `gamma` overrides the environment's discount when set.
MdpModel build_model(const EnvironmentSpec& env, std::optional<double> gamma = std::nullopt);

/// Q* for (model, delta, tol), read from or written to `cache_dir` keyed by
/// model hash, delta and tol. Empty `cache_dir` disables the cache.
FixedPointResult cached_q_star(const MdpModel& model, double delta, double tol, const std::string& cache_dir);

std::string default_cache_dir(const ExperimentConfig& config);

struct BatchResult {
    MdpModel model;
    QTable q_star;
    std::vector<TrajectoryRecord> records;
};

/// Builds the model, resolves Q* through the cache and runs every trajectory.
BatchResult run_batch(const ExperimentConfig& config, std::optional<double> gamma = std::nullopt);

// CSV writers. Aggregate header: iteration,mean_error,stderr,mean_cum_draws.
void write_trajectory_csv(const TrajectoryRecord& record, const std::string& path);
void write_aggregate_csv(const AggregateCurve& curve, const std::string& path);
AggregateCurve read_aggregate_csv(const std::string& path);

struct QStarSummary {
    FixedPointResult solution;
    double norm;
    double norm_bound;  // r_max / (1 - gamma)
    bool bound_holds;
};

/// Solves Q* and writes the Q-table JSON plus its report to `out_path`.
QStarSummary cmd_qstar(const MdpModel& model, double delta, double tol, const std::string& out_path);

struct CurveOutput {
    std::string label;
    double gamma;
    double delta;
    double g;
    std::string directory;
    std::optional<AggregateCurve> curve;  // absent for a single trajectory
    std::vector<TrajectoryRecord> records;
};

/// One batch per entry of config.gammas (or a single batch). Writes per
/// trajectory CSVs, aggregate CSVs and a gnuplot script.
std::vector<CurveOutput> cmd_run(const ExperimentConfig& config);

struct GammaRegressionRow {
    std::int64_t checkpoint;
    LineFit fit;
};

/// Least-squares slope of lg(mean error) on lg(1 - gamma) per checkpoint.
/// `errors[j][c]` is the mean error for gammas[j] at checkpoints[c].
std::vector<GammaRegressionRow> gamma_regression(const std::vector<double>& gammas,
                                                 const std::vector<std::int64_t>& checkpoints,
                                                 const std::vector<std::vector<double>>& errors);

/// Needs at least four gammas; runs up to the largest checkpoint.
std::vector<GammaRegressionRow> cmd_gamma_sweep(const ExperimentConfig& config);

/// One run per delta in config.deltas, plus delta_sweep.csv with the final
/// mean errors.
std::vector<CurveOutput> cmd_delta_sweep(const ExperimentConfig& config);

struct GComparison {
    double g;
    CurveOutput output;
    double mean_draws_per_call;
    std::uint64_t median_call_draws;
    std::uint64_t max_call_draws;
};

/// Identical batches differing only in g (config.g_values). Writes
/// comparison.csv, smoothed.csv and a plot script.
std::vector<GComparison> cmd_compare_g(const ExperimentConfig& config);

/// Relative paths of the data files a gnuplot script reads.
std::vector<std::string> plot_script_inputs(const std::string& script_path);

}  // namespace drql

#endif  // DRQL_EXPERIMENT_HPP
