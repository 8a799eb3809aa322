#ifndef DRQL_ENVIRONMENTS_HPP
#define DRQL_ENVIRONMENTS_HPP

#include <optional>

#include "drql/mdp.hpp"

namespace drql {

/// Four-state, two-action lower-bound instance for classical Q-learning.
///
///   state 0: absorbing, reward 0
///   state 1: stays with prob p, falls to 0 otherwise, reward 1
///   state 2: stays with prob p, falls to 0 otherwise, reward 1
///   state 3: absorbing, reward 1
///
/// Both actions share these dynamics in every state, so the max over actions
/// only ever sees estimation noise. Rewards are deterministic.
struct HardMdpParams {
    double gamma = 0.7;
    /// Defaults to (4 gamma - 1) / (3 gamma).
    std::optional<double> p;
};

double hard_mdp_default_p(double gamma);

/// Throws std::invalid_argument for gamma <= 1/4 or gamma >= 1, or p outside (0, 1).
MdpModel make_hard_mdp(const HardMdpParams& params);

/// Lost-sales inventory with iid demand. States are stock levels 0..n_s,
/// actions order sizes 0..n_a, and only s + a <= n_s is feasible. One day
/// costs k 1{a > 0} + h (s + a - d)_+ + p_cost (s + a - d)_- and moves the
/// stock to (s + a - d)_+. Rewards are c_max - cost, where c_max is the
/// largest cost over feasible (s, a, d), so every reward is >= 0.
struct InventoryParams {
    Index n_s = 7;
    Index n_a = 7;
    Index n_d = 7;
    double order_cost = 3.0;
    double holding_cost = 1.0;
    double lost_sale_cost = 2.0;
    double gamma = 0.7;
    /// Probabilities over demand 0..n_d; uniform when empty.
    std::vector<double> demand;
};

double inventory_cost(const InventoryParams& params, Index s, Index a, Index d);
double inventory_max_cost(const InventoryParams& params);

MdpModel make_inventory_mdp(const InventoryParams& params);

}  // namespace drql

#endif  // DRQL_ENVIRONMENTS_HPP
