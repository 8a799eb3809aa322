#include "drql/environments.hpp"

#include <map>
#include <stdexcept>

namespace drql {

double hard_mdp_default_p(double gamma) { return (4.0 * gamma - 1.0) / (3.0 * gamma); }

MdpModel make_hard_mdp(const HardMdpParams& params) {
    const double gamma = params.gamma;
    if (!(gamma > 0.25 && gamma < 1.0)) {
        throw std::invalid_argument("make_hard_mdp: gamma must lie in (1/4, 1)");
    }
    const double p = params.p.value_or(hard_mdp_default_p(gamma));
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("make_hard_mdp: p must lie in (0, 1)");
    }

    constexpr Index kStates = 4;
    constexpr Index kActions = 2;
    auto stay_or_fall = [p](Index s) {
        return Distribution({s, 0}, (Eigen::VectorXd(2) << p, 1.0 - p).finished());
    };
    std::vector<std::optional<MdpModel::Row>> rows(kStates * kActions);
    for (Index a = 0; a < kActions; ++a) {
        rows[0 * kActions + a] = MdpModel::Row{Distribution::point_mass(0), Distribution::point_mass_value(0.0)};
        rows[1 * kActions + a] = MdpModel::Row{stay_or_fall(1), Distribution::point_mass_value(1.0)};
        rows[2 * kActions + a] = MdpModel::Row{stay_or_fall(2), Distribution::point_mass_value(1.0)};
        rows[3 * kActions + a] = MdpModel::Row{Distribution::point_mass(3), Distribution::point_mass_value(1.0)};
    }
    std::vector<std::vector<Index>> feasible(kStates, std::vector<Index>{0, 1});
    return MdpModel(kStates, kActions, gamma, std::move(feasible), std::move(rows));
}

double inventory_cost(const InventoryParams& params, Index s, Index a, Index d) {
    const double net = static_cast<double>(s + a - d);
    return (a > 0 ? params.order_cost : 0.0) + params.holding_cost * std::max(net, 0.0) +
           params.lost_sale_cost * std::max(-net, 0.0);
}

double inventory_max_cost(const InventoryParams& params) {
    double worst = 0.0;
    for (Index s = 0; s <= params.n_s; ++s) {
        for (Index a = 0; a <= params.n_a && s + a <= params.n_s; ++a) {
            for (Index d = 0; d <= params.n_d; ++d) {
                worst = std::max(worst, inventory_cost(params, s, a, d));
            }
        }
    }
    return worst;
}

MdpModel make_inventory_mdp(const InventoryParams& params) {
    if (params.n_s < 0 || params.n_a < 0 || params.n_d < 0) {
        throw std::invalid_argument("make_inventory_mdp: space sizes must be >= 0");
    }
    if (params.n_a > params.n_s) {
        throw std::invalid_argument("make_inventory_mdp: n_a must not exceed n_s");
    }
    if (params.order_cost < 0.0 || params.holding_cost < 0.0 || params.lost_sale_cost < 0.0) {
        throw std::invalid_argument("make_inventory_mdp: costs must be >= 0");
    }
    const Index n_demand = params.n_d + 1;
    std::vector<double> demand = params.demand;
    if (demand.empty()) {
        demand.assign(static_cast<std::size_t>(n_demand), 1.0 / static_cast<double>(n_demand));
    }
    if (static_cast<Index>(demand.size()) != n_demand) {
        throw std::invalid_argument("make_inventory_mdp: demand law needs n_d + 1 probabilities");
    }

    const Index n_states = params.n_s + 1;
    const Index n_actions = params.n_a + 1;
    const double c_max = inventory_max_cost(params);

    std::vector<std::vector<Index>> feasible(static_cast<std::size_t>(n_states));
    std::vector<std::optional<MdpModel::Row>> rows(static_cast<std::size_t>(n_states * n_actions));
    for (Index s = 0; s < n_states; ++s) {
        for (Index a = 0; a < n_actions && s + a <= params.n_s; ++a) {
            feasible[static_cast<std::size_t>(s)].push_back(a);
            // pushforward of the demand law; equal next states and equal rewards pool
            std::map<Index, double> next_mass;
            std::map<double, double> reward_mass;
            for (Index d = 0; d < n_demand; ++d) {
                const double prob = demand[static_cast<std::size_t>(d)];
                next_mass[std::max<Index>(s + a - d, 0)] += prob;
                reward_mass[c_max - inventory_cost(params, s, a, d)] += prob;
            }
            std::vector<Index> next_states;
            Eigen::VectorXd next_probs(static_cast<Index>(next_mass.size()));
            for (const auto& [next, prob] : next_mass) {
                next_probs[static_cast<Index>(next_states.size())] = prob;
                next_states.push_back(next);
            }
            std::vector<Index> labels;
            Eigen::VectorXd reward_values(static_cast<Index>(reward_mass.size()));
            Eigen::VectorXd reward_probs(static_cast<Index>(reward_mass.size()));
            for (const auto& [value, prob] : reward_mass) {
                const auto i = static_cast<Index>(labels.size());
                reward_values[i] = value;
                reward_probs[i] = prob;
                labels.push_back(i);
            }
            rows[static_cast<std::size_t>(s * n_actions + a)] =
                MdpModel::Row{Distribution(std::move(next_states), std::move(next_probs)),
                              Distribution(std::move(labels), std::move(reward_probs), std::move(reward_values))};
        }
    }
    return MdpModel(n_states, n_actions, params.gamma, std::move(feasible), std::move(rows));
}

}  // namespace drql
