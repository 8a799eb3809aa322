#ifndef DRQL_Q_LEARNING_HPP
#define DRQL_Q_LEARNING_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "drql/mdp.hpp"
#include "drql/qtable.hpp"
#include "drql/rng.hpp"

namespace drql {

/// alpha_k = alpha (constant) or alpha_k = a / (b + (1 - gamma) k)
/// (rescaled-linear). Every alpha_k must lie in (0, 1]; for the rescaled
/// form that means 0 < a <= b.
class StepsizeSchedule {
public:
    enum class Kind { Constant, RescaledLinear };

    static StepsizeSchedule constant(double alpha);
    static StepsizeSchedule rescaled_linear(double a = 1.0, double b = 1.0);

    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double a() const { return a_; }
    double b() const { return b_; }

    double at(std::int64_t k, double gamma) const;

private:
    StepsizeSchedule(Kind kind, double alpha, double a, double b) : kind_(kind), alpha_(alpha), a_(a), b_(b) {}

    Kind kind_;
    double alpha_;
    double a_;
    double b_;
};

struct TrajectoryRecord {
    /// ||Q_k - Q*||_inf for k = 0..T; empty when no oracle was supplied.
    std::vector<double> errors;
    /// Simulator draws consumed before iterate k, for k = 0..T.
    std::vector<std::uint64_t> cumulative_draws;
    /// Histogram of per-call draw counts (2^(N1+1) + 2^(N2+1)).
    std::map<std::uint64_t, std::uint64_t> call_draws;
    QTable final_q;
};

struct RunOptions {
    double delta = 0.1;
    double g = 0.625;
    StepsizeSchedule schedule = StepsizeSchedule::rescaled_linear();
    std::int64_t iterations = 1000;
};

/// Synchronous MLMC-DR Q-learning from Q = 0. Every iteration sweeps all
/// feasible pairs in row-major order, one fresh estimate per pair, all built
/// from the previous iterate, then applies Q <- (1 - alpha_k) Q + alpha_k T_hat.
/// Throws NumericError if an iterate becomes non-finite.
TrajectoryRecord run(const MdpModel& model, const RunOptions& options, RngStream& rng,
                     const QTable* oracle = nullptr);

struct BatchOptions {
    RunOptions run;
    std::int64_t trajectories = 1;
    std::uint64_t seed = 0;
    /// 0 picks std::thread::hardware_concurrency().
    unsigned workers = 0;
};

/// Independent trajectories, trajectory i on stream (seed, i). Output is
/// independent of the worker count.
std::vector<TrajectoryRecord> run_batch(const MdpModel& model, const BatchOptions& options,
                                        const QTable* oracle = nullptr);

}  // namespace drql

#endif  // DRQL_Q_LEARNING_HPP
