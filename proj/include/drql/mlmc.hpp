#ifndef DRQL_MLMC_HPP
#define DRQL_MLMC_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "drql/mdp.hpp"
#include "drql/qtable.hpp"
#include "drql/rng.hpp"

namespace drql {

/// Highest level the estimator accepts. A draw above it is an error: silently
/// truncating the geometric law would bias the estimator.
inline constexpr int kMaxLevel = 40;

/// Smallest configurable geometric parameter (exclusive).
inline constexpr double kMinLevelParameter = 0.05;

/// Level n ~ Geo(g), P(n) = g (1 - g)^n. Level n consumes 2^(n+1) draws.
struct GeometricLevel {
    double g;
    int n;
    double p_n;

    std::uint64_t sample_count() const { return std::uint64_t{2} << n; }
};

/// g (1 - g)^n.
double level_probability(double g, int n);

/// Throws std::invalid_argument for g outside (0, 1) and NumericError when
/// the drawn level exceeds kMaxLevel.
GeometricLevel draw_level(double g, RngStream& rng);

/// Expected draws per estimator call, E[2^(N1+1) + 2^(N2+1)] = 4g / (2g - 1).
/// Infinite for g <= 1/2.
double expected_draws_per_call(double g);

/// Ordered batch of 2^(n+1) draws (positions into the sampled Categorical).
struct MlmcSample {
    GeometricLevel level;
    std::vector<Index> draws;
};

/// Per-position counts of one batch. With 1-based draw positions, odd
/// positions (1, 3, ...) form the odd sub-measure and even positions the
/// even one; each holds 2^n draws and full = odd + even.
struct EmpiricalSplit {
    Eigen::VectorXd full;
    Eigen::VectorXd odd;
    Eigen::VectorXd even;
    Index first = 0;  // position of the first draw
};

MlmcSample draw_sample(const Distribution& dist, const GeometricLevel& level, RngStream& rng);

EmpiricalSplit split_draws(std::span<const Index> draws, Index n_positions);

/// Draws a level-n batch straight into counts. For n <= 12 it consumes the
/// stream exactly like draw_sample; larger batches draw each half as a
/// multinomial (same law, bounded cost).
EmpiricalSplit sample_split(const Distribution& dist, int level, RngStream& rng);

/// sup f(full) - 1/2 sup f(even) - 1/2 sup f(odd), `payoff` indexed by
/// position. Exactly zero when delta == 0.
double delta_correction(const EmpiricalSplit& split, const Eigen::VectorXd& payoff, double delta);

struct BellmanEstimate {
    double value;
    std::uint64_t draws;
    int reward_level;
    int value_level;
};

/// One MLMC-DR estimate of T_delta(Q)(s, a):
///   r_1 + Delta^R / p_{N1} + gamma (v(Q)(s'_1) + Delta^P / p_{N2}),
/// where r_1 and s'_1 are the first draws of their batches.
BellmanEstimate estimate_bellman(const MdpModel& model, const QTable& q, Index s, Index a, double delta, double g,
                                 RngStream& rng);

/// Same estimate with a precomputed v(Q) (indexed by state).
BellmanEstimate estimate_bellman(const MdpModel& model, const Eigen::VectorXd& state_value, Index s, Index a,
                                 double delta, double g, RngStream& rng);

}  // namespace drql

#endif  // DRQL_MLMC_HPP
