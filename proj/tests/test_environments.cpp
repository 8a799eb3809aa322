#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "drql/dr_oracle.hpp"
#include "drql/environments.hpp"
#include "support/oracles.hpp"

using namespace drql;

TEST_SUITE("environments") {

TEST_CASE("hard MDP parameters") {
    CHECK(hard_mdp_default_p(0.7) == doctest::Approx(6.0 / 7).epsilon(1e-14));
    const auto model = make_hard_mdp({});
    CHECK(model.n_states() == 4);
    CHECK(model.n_actions() == 2);
    CHECK(model.feasible_pairs().size() == 8);
    CHECK(min_support_probability(model) == doctest::Approx(1.0 / 7).epsilon(1e-12));
    CHECK(model.r_max() == 1.0);
    CHECK_THROWS_AS(make_hard_mdp({0.25, std::nullopt}), std::invalid_argument);
    CHECK_THROWS_AS(make_hard_mdp({0.2, std::nullopt}), std::invalid_argument);
    CHECK_THROWS_AS(make_hard_mdp({1.0, std::nullopt}), std::invalid_argument);
    CHECK_THROWS_AS(make_hard_mdp({0.7, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_hard_mdp({0.7, 0.0}), std::invalid_argument);
    CHECK(make_hard_mdp({0.7, 0.5}).transition(1, 0).probs().minCoeff() == doctest::Approx(0.5));
}

TEST_CASE("hard MDP rows") {
    const double gamma = 0.8;
    const double p = hard_mdp_default_p(gamma);
    const auto model = make_hard_mdp({gamma, std::nullopt});
    for (Index a = 0; a < 2; ++a) {
        const auto expect_row = [&](Index s, std::map<Index, double> law, double reward) {
            const auto& t = model.transition(s, a);
            std::map<Index, double> got;
            for (Index i = 0; i < t.size(); ++i) got[t.outcome(i)] += t.probs()[i];
            for (const auto& [next, prob] : law) CHECK(got[next] == doctest::Approx(prob).epsilon(1e-14));
            CHECK(model.reward(s, a).probs().dot(model.reward(s, a).values()) == reward);
        };
        expect_row(0, {{0, 1.0}}, 0.0);
        expect_row(1, {{1, p}, {0, 1.0 - p}}, 1.0);
        expect_row(2, {{2, p}, {0, 1.0 - p}}, 1.0);
        expect_row(3, {{3, 1.0}}, 1.0);
    }
    // classical value of the transient states: 1 / (1 - gamma p)
    const QTable q0 = solve_q_star(model, 0.0, 1e-12).q;
    CHECK(q0(1, 0) == doctest::Approx(1.0 / (1.0 - gamma * p)).epsilon(1e-10));
    CHECK(q0(3, 1) == doctest::Approx(1.0 / (1.0 - gamma)).epsilon(1e-10));
}

TEST_CASE("inventory cost examples") {
    const InventoryParams params;
    for (Index d = 0; d <= 7; ++d) CHECK(inventory_cost(params, 0, 0, d) == 2.0 * static_cast<double>(d));
    CHECK(inventory_cost(params, 7, 0, 0) == 7.0);
    CHECK(inventory_cost(params, 2, 3, 1) == 3.0 + 4.0);
    CHECK(inventory_cost(params, 2, 3, 7) == 3.0 + 2.0 * 2.0);
    CHECK(inventory_max_cost(params) == 15.0);

    const auto model = make_inventory_mdp(params);
    CHECK(model.n_states() == 8);
    CHECK(model.n_actions() == 8);
    CHECK(model.feasible_pairs().size() == 36);
    CHECK(model.transition(0, 0).size() == 1);
    CHECK(model.transition(0, 0).outcome(0) == 0);
    CHECK_THROWS_AS(make_inventory_mdp({7, 8}), std::invalid_argument);
}

TEST_CASE("transitions and rewards are the demand pushforward") {
    InventoryParams params;
    params.demand = {0.05, 0.1, 0.2, 0.05, 0.15, 0.25, 0.1, 0.1};
    for (const auto& p : {InventoryParams{}, params}) {
        const auto model = make_inventory_mdp(p);
        const double c_max = inventory_max_cost(p);
        const auto demand_prob = [&](Index d) {
            return p.demand.empty() ? 1.0 / static_cast<double>(p.n_d + 1) : p.demand[static_cast<std::size_t>(d)];
        };
        for (const auto& [s, a] : model.feasible_pairs()) {
            std::map<Index, double> next_law;
            std::map<double, double> reward_law;
            for (Index d = 0; d <= p.n_d; ++d) {
                next_law[std::max<Index>(s + a - d, 0)] += demand_prob(d);
                const double cost = (a > 0 ? p.order_cost : 0.0) + p.holding_cost * std::max<double>(s + a - d, 0) +
                                    p.lost_sale_cost * std::max<double>(d - s - a, 0);
                reward_law[c_max - cost] += demand_prob(d);
            }
            const auto& t = model.transition(s, a);
            std::map<Index, double> got_next;
            for (Index i = 0; i < t.size(); ++i) got_next[t.outcome(i)] += t.probs()[i];
            REQUIRE(got_next.size() == next_law.size());
            for (const auto& [next, prob] : next_law) CHECK(got_next[next] == doctest::Approx(prob).epsilon(1e-12));

            const auto& r = model.reward(s, a);
            std::map<double, double> got_reward;
            for (Index i = 0; i < r.size(); ++i) {
                CHECK(r.values()[i] >= 0.0);
                got_reward[r.values()[i]] += r.probs()[i];
            }
            REQUIRE(got_reward.size() == reward_law.size());
            for (const auto& [value, prob] : reward_law) {
                CHECK(got_reward[value] == doctest::Approx(prob).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("reward transform keeps the minimal-cost policy") {
    for (double gamma : {0.5, 0.7, 0.9}) {
        InventoryParams p;
        p.gamma = gamma;
        const auto model = make_inventory_mdp(p);
        const std::vector<Index> greedy = greedy_policy(solve_q_star(model, 0.0, 1e-11).q);

        // cost-based value iteration built straight from the cost formula
        const Index n = p.n_s + 1;
        const double pd = 1.0 / static_cast<double>(p.n_d + 1);
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        Eigen::MatrixXd c(n, p.n_a + 1);
        for (int it = 0; it < 3000; ++it) {
            c.setConstant(std::numeric_limits<double>::infinity());
            for (Index s = 0; s < n; ++s) {
                for (Index a = 0; s + a <= p.n_s && a <= p.n_a; ++a) {
                    double total = 0.0;
                    for (Index d = 0; d <= p.n_d; ++d) {
                        total += pd * (inventory_cost(p, s, a, d) + gamma * v[std::max<Index>(s + a - d, 0)]);
                    }
                    c(s, a) = total;
                }
            }
            v = c.rowwise().minCoeff();
        }
        for (Index s = 0; s < n; ++s) {
            const double chosen = c(s, greedy[static_cast<std::size_t>(s)]);
            CHECK(chosen <= v[s] + 1e-9);
        }
    }
}

}  // TEST_SUITE
