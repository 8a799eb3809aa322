#include "drql/mlmc.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "drql/errors.hpp"
#include "drql/kl_dual.hpp"

namespace drql {

namespace {

constexpr int kDirectSamplingMaxLevel = 12;

void validate_level_parameter(double g) {
    if (!(g > 0.0 && g < 1.0)) {
        throw std::invalid_argument("geometric level parameter g must lie in (0, 1)");
    }
}

// Adds `count` iid draws to `counts` by sequential conditional binomials.
void add_multinomial(const Distribution& dist, std::int64_t count, Eigen::VectorXd& counts, RngStream& rng) {
    double remaining_mass = 1.0;
    std::int64_t remaining = count;
    const auto& probs = dist.probs();
    for (Index i = 0; i < probs.size() && remaining > 0; ++i) {
        if (probs[i] <= 0.0) {
            continue;
        }
        std::int64_t taken = remaining;
        if (i + 1 < probs.size() && probs[i] < remaining_mass) {
            const double p = std::clamp(probs[i] / remaining_mass, 0.0, 1.0);
            taken = std::binomial_distribution<std::int64_t>(remaining, p)(rng);
        }
        counts[i] += static_cast<double>(taken);
        remaining -= taken;
        remaining_mass -= probs[i];
    }
    if (remaining > 0) {
        // rounding left mass on the table; the last positive entry absorbs it
        Index last = probs.size() - 1;
        while (last > 0 && probs[last] <= 0.0) {
            --last;
        }
        counts[last] += static_cast<double>(remaining);
    }
}

double sup_value(const Eigen::VectorXd& weights, const Eigen::VectorXd& payoff, double delta) {
    return solve_dual(weights, payoff, delta).value;
}

}  // namespace

double level_probability(double g, int n) { return g * std::pow(1.0 - g, n); }

GeometricLevel draw_level(double g, RngStream& rng) {
    validate_level_parameter(g);
    std::geometric_distribution<int> law(g);
    const int n = law(rng);
    if (n > kMaxLevel) {
        throw NumericError("MLMC level " + std::to_string(n) + " exceeds the cap of " + std::to_string(kMaxLevel));
    }
    return {g, n, level_probability(g, n)};
}

double expected_draws_per_call(double g) {
    validate_level_parameter(g);
    if (g <= 0.5) {
        return std::numeric_limits<double>::infinity();
    }
    return 4.0 * g / (2.0 * g - 1.0);
}

MlmcSample draw_sample(const Distribution& dist, const GeometricLevel& level, RngStream& rng) {
    MlmcSample sample{level, {}};
    const auto count = level.sample_count();
    sample.draws.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        sample.draws.push_back(dist.sample_position(rng));
    }
    return sample;
}

EmpiricalSplit split_draws(std::span<const Index> draws, Index n_positions) {
    if (draws.size() < 2 || draws.size() % 2 != 0) {
        throw std::invalid_argument("split_draws: need an even, nonzero number of draws");
    }
    EmpiricalSplit split{Eigen::VectorXd::Zero(n_positions), Eigen::VectorXd::Zero(n_positions),
                         Eigen::VectorXd::Zero(n_positions), draws.front()};
    for (std::size_t i = 0; i < draws.size(); ++i) {
        const Index pos = draws[i];
        if (pos < 0 || pos >= n_positions) {
            throw std::invalid_argument("split_draws: position out of range");
        }
        split.full[pos] += 1.0;
        // index i is 0-based, so even i is an odd 1-based position
        if (i % 2 == 0) {
            split.odd[pos] += 1.0;
        } else {
            split.even[pos] += 1.0;
        }
    }
    return split;
}

EmpiricalSplit sample_split(const Distribution& dist, int level, RngStream& rng) {
    if (level < 0 || level > kMaxLevel) {
        throw std::invalid_argument("sample_split: level out of range");
    }
    const Index k = dist.size();
    EmpiricalSplit split{Eigen::VectorXd::Zero(k), Eigen::VectorXd::Zero(k), Eigen::VectorXd::Zero(k), 0};
    const std::uint64_t total = std::uint64_t{2} << level;
    if (level <= kDirectSamplingMaxLevel) {
        for (std::uint64_t i = 0; i < total; ++i) {
            const Index pos = dist.sample_position(rng);
            if (i == 0) {
                split.first = pos;
            }
            split.full[pos] += 1.0;
            if (i % 2 == 0) {
                split.odd[pos] += 1.0;
            } else {
                split.even[pos] += 1.0;
            }
        }
        return split;
    }
    const auto half = static_cast<std::int64_t>(total / 2);
    split.first = dist.sample_position(rng);
    split.odd[split.first] += 1.0;
    add_multinomial(dist, half - 1, split.odd, rng);
    add_multinomial(dist, half, split.even, rng);
    split.full = split.odd + split.even;
    return split;
}

double delta_correction(const EmpiricalSplit& split, const Eigen::VectorXd& payoff, double delta) {
    if (delta == 0.0) {
        return 0.0;
    }
    return sup_value(split.full, payoff, delta) - 0.5 * sup_value(split.even, payoff, delta) -
           0.5 * sup_value(split.odd, payoff, delta);
}

BellmanEstimate estimate_bellman(const MdpModel& model, const Eigen::VectorXd& state_value, Index s, Index a,
                                 double delta, double g, RngStream& rng) {
    if (!(g > kMinLevelParameter && g < 1.0)) {
        throw std::invalid_argument("estimate_bellman: g must lie in (0.05, 1)");
    }
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
        throw std::invalid_argument("estimate_bellman: delta must be finite and >= 0");
    }
    const auto& reward = model.reward(s, a);
    const auto& transition = model.transition(s, a);

    const GeometricLevel reward_level = draw_level(g, rng);
    const GeometricLevel value_level = draw_level(g, rng);

    const EmpiricalSplit rewards = sample_split(reward, reward_level.n, rng);
    const EmpiricalSplit next_states = sample_split(transition, value_level.n, rng);

    Eigen::VectorXd continuation(transition.size());
    for (Index i = 0; i < transition.size(); ++i) {
        continuation[i] = state_value[transition.outcome(i)];
    }

    const double r_hat =
        reward.values()[rewards.first] + delta_correction(rewards, reward.values(), delta) / reward_level.p_n;
    const double v_hat =
        continuation[next_states.first] + delta_correction(next_states, continuation, delta) / value_level.p_n;

    return {r_hat + model.gamma() * v_hat, reward_level.sample_count() + value_level.sample_count(), reward_level.n,
            value_level.n};
}

BellmanEstimate estimate_bellman(const MdpModel& model, const QTable& q, Index s, Index a, double delta, double g,
                                 RngStream& rng) {
    return estimate_bellman(model, state_values(q), s, a, delta, g, rng);
}

}  // namespace drql
