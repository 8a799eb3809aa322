#include "drql/dr_oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "drql/errors.hpp"
#include "drql/kl_dual.hpp"

namespace drql {

double robust_reward(const MdpModel& model, Index s, Index a, double delta) {
    const auto& reward = model.reward(s, a);
    return solve_dual(reward.probs(), reward.values(), delta).value;
}

double robust_continuation(const MdpModel& model, Index s, Index a, const Eigen::VectorXd& state_payoff,
                           double delta) {
    const auto& transition = model.transition(s, a);
    Eigen::VectorXd payoff(transition.size());
    for (Index i = 0; i < transition.size(); ++i) {
        payoff[i] = state_payoff[transition.outcome(i)];
    }
    return solve_dual(transition.probs(), payoff, delta).value;
}

QTable exact_bellman(const MdpModel& model, const QTable& q, double delta) {
    if (q.n_states() != model.n_states() || q.n_actions() != model.n_actions()) {
        throw std::invalid_argument("exact_bellman: Q table shape does not match the model");
    }
    const Eigen::VectorXd v = state_values(q);
    QTable out = QTable::zeros(model);
    for (const auto& [s, a] : model.feasible_pairs()) {
        out(s, a) = robust_reward(model, s, a, delta) + model.gamma() * robust_continuation(model, s, a, v, delta);
    }
    return out;
}

int fixed_point_iteration_cap(const MdpModel& model, double tol) {
    constexpr int kMargin = 50;
    const double gamma = model.gamma();
    const double r_max = model.r_max();
    if (r_max <= 0.0) {
        return kMargin;
    }
    const double sweeps = std::log(tol * (1.0 - gamma) / r_max) / std::log(gamma);
    return static_cast<int>(std::ceil(std::max(sweeps, 0.0))) + kMargin;
}

FixedPointResult solve_q_star(const MdpModel& model, double delta, double tol) {
    if (!(tol > 0.0)) {
        throw std::invalid_argument("solve_q_star: tol must be > 0");
    }
    const double gamma = model.gamma();
    const double stop = tol * (1.0 - gamma) / gamma;
    const int cap = fixed_point_iteration_cap(model, tol);

    FixedPointResult result{QTable::zeros(model), {}};
    double previous = 0.0;
    for (int it = 1; it <= cap; ++it) {
        QTable next = exact_bellman(model, result.q, delta);
        const double residual = sup_distance(next, result.q);
        result.q = std::move(next);
        if (!std::isfinite(residual)) {
            throw NumericError("solve_q_star: non-finite residual");
        }
        result.report.residuals.push_back(residual);
        if (it > 1 && previous > 0.0) {
            result.report.contraction_ratios.push_back(residual / previous);
        }
        previous = residual;
        result.report.iterations = it;
        result.report.final_residual = residual;
        if (residual <= stop) {
            return result;
        }
    }
    throw NumericError("solve_q_star: no convergence within " + std::to_string(cap) + " sweeps (residual " +
                       std::to_string(result.report.final_residual) + ")");
}

nlohmann::json qtable_to_json(const QTable& q) {
    nlohmann::json doc;
    doc["n_states"] = q.n_states();
    doc["n_actions"] = q.n_actions();
    auto rows = nlohmann::json::array();
    for (Index s = 0; s < q.n_states(); ++s) {
        auto row = nlohmann::json::array();
        for (Index a = 0; a < q.n_actions(); ++a) {
            if (q.feasible(s, a)) {
                row.push_back(q(s, a));
            } else {
                row.push_back(nullptr);
            }
        }
        rows.push_back(std::move(row));
    }
    doc["values"] = std::move(rows);
    return doc;
}

QTable qtable_from_json(const nlohmann::json& doc) {
    try {
        const Index n_states = doc.at("n_states").get<Index>();
        const Index n_actions = doc.at("n_actions").get<Index>();
        const auto& rows = doc.at("values");
        if (n_states < 1 || n_actions < 1 || rows.size() != static_cast<std::size_t>(n_states)) {
            throw std::invalid_argument("Q-table JSON: header does not match values");
        }
        QTable q;
        q.values = QTable::Matrix::Zero(n_states, n_actions);
        q.feasible = QTable::Mask::Constant(n_states, n_actions, false);
        for (Index s = 0; s < n_states; ++s) {
            const auto& row = rows[static_cast<std::size_t>(s)];
            if (row.size() != static_cast<std::size_t>(n_actions)) {
                throw std::invalid_argument("Q-table JSON: row " + std::to_string(s) + " has the wrong length");
            }
            for (Index a = 0; a < n_actions; ++a) {
                const auto& cell = row[static_cast<std::size_t>(a)];
                if (!cell.is_null()) {
                    q(s, a) = cell.get<double>();
                    q.feasible(s, a) = true;
                }
            }
        }
        return q;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("Q-table JSON: ") + e.what());
    }
}

}  // namespace drql
