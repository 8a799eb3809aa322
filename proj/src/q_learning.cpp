#include "drql/q_learning.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "drql/errors.hpp"
#include "drql/mlmc.hpp"

namespace drql {

StepsizeSchedule StepsizeSchedule::constant(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("constant stepsize must lie in (0, 1]");
    }
    return {Kind::Constant, alpha, 0.0, 0.0};
}

StepsizeSchedule StepsizeSchedule::rescaled_linear(double a, double b) {
    if (!(a > 0.0 && a <= b) || !std::isfinite(b)) {
        throw std::invalid_argument("rescaled-linear stepsize needs 0 < a <= b");
    }
    return {Kind::RescaledLinear, 0.0, a, b};
}

double StepsizeSchedule::at(std::int64_t k, double gamma) const {
    if (k < 0) {
        throw std::invalid_argument("stepsize index must be >= 0");
    }
    if (kind_ == Kind::Constant) {
        return alpha_;
    }
    return a_ / (b_ + (1.0 - gamma) * static_cast<double>(k));
}

TrajectoryRecord run(const MdpModel& model, const RunOptions& options, RngStream& rng, const QTable* oracle) {
    if (options.iterations < 0) {
        throw std::invalid_argument("run: iteration budget must be >= 0");
    }
    if (oracle && (oracle->n_states() != model.n_states() || oracle->n_actions() != model.n_actions())) {
        throw std::invalid_argument("run: oracle shape does not match the model");
    }
    const auto budget = static_cast<std::size_t>(options.iterations);
    TrajectoryRecord record;
    record.final_q = QTable::zeros(model);
    record.cumulative_draws.reserve(budget + 1);
    record.cumulative_draws.push_back(0);
    if (oracle) {
        record.errors.reserve(budget + 1);
        record.errors.push_back(sup_distance(record.final_q, *oracle));
    }

    QTable& q = record.final_q;
    QTable target = q;
    std::uint64_t draws = 0;
    for (std::int64_t k = 0; k < options.iterations; ++k) {
        const double alpha = options.schedule.at(k, model.gamma());
        if (!(alpha > 0.0 && alpha <= 1.0)) {
            throw std::invalid_argument("run: stepsize left (0, 1]");
        }
        const Eigen::VectorXd v = state_values(q);
        for (const auto& [s, a] : model.feasible_pairs()) {
            const BellmanEstimate est = estimate_bellman(model, v, s, a, options.delta, options.g, rng);
            target(s, a) = est.value;
            draws += est.draws;
            ++record.call_draws[est.draws];
        }
        q.values = (1.0 - alpha) * q.values + alpha * target.values;
        if (!q.values.allFinite()) {
            throw NumericError("run: non-finite iterate at k = " + std::to_string(k + 1));
        }
        record.cumulative_draws.push_back(draws);
        if (oracle) {
            record.errors.push_back(sup_distance(q, *oracle));
        }
    }
    return record;
}

std::vector<TrajectoryRecord> run_batch(const MdpModel& model, const BatchOptions& options, const QTable* oracle) {
    if (options.trajectories < 1) {
        throw std::invalid_argument("run_batch: trajectory count must be >= 1");
    }
    const auto count = static_cast<std::size_t>(options.trajectories);
    std::vector<TrajectoryRecord> records(count);

    unsigned workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                RngStream rng(options.seed, i);
                records[i] = run(model, options.run, rng, oracle);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = count;
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return records;
}

}  // namespace drql
