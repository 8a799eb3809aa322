#ifndef DRQL_DR_ORACLE_HPP
#define DRQL_DR_ORACLE_HPP

#include <vector>

#include "drql/mdp.hpp"
#include "drql/qtable.hpp"

namespace drql {

/// Worst-case expected reward of the (s, a) reward law over the KL ball.
double robust_reward(const MdpModel& model, Index s, Index a, double delta);

/// Worst-case expectation of `state_payoff` (indexed by state) under the
/// (s, a) transition row.
double robust_continuation(const MdpModel& model, Index s, Index a, const Eigen::VectorXd& state_payoff,
                           double delta);

/// Population DR Bellman operator in dual form. delta == 0 gives the
/// classical operator E[r] + gamma E[v(Q)].
QTable exact_bellman(const MdpModel& model, const QTable& q, double delta);

struct FixedPointReport {
    int iterations = 0;
    double final_residual = 0.0;
    /// ||Q_t - Q_{t-1}||_inf after each sweep.
    std::vector<double> residuals;
    /// residual_{t+1} / residual_t for consecutive sweeps.
    std::vector<double> contraction_ratios;
};

struct FixedPointResult {
    QTable q;
    FixedPointReport report;
};

/// Value iteration from Q = 0 until the sweep residual is at most
/// tol * (1 - gamma) / gamma, which certifies ||Q - Q*||_inf <= tol.
/// Throws NumericError when the iteration cap is exceeded.
FixedPointResult solve_q_star(const MdpModel& model, double delta, double tol);

/// Sweep cap used by solve_q_star.
int fixed_point_iteration_cap(const MdpModel& model, double tol);

}  // namespace drql

#endif  // DRQL_DR_ORACLE_HPP
