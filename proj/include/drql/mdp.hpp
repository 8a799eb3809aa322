#ifndef DRQL_MDP_HPP
#define DRQL_MDP_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "drql/categorical.hpp"

namespace drql {

using Distribution = Categorical<double>;

/// Finite MDP with categorical transition and reward laws.
///
/// Only feasible (s, a) pairs carry rows. Transition outcomes are next-state
/// indices; reward rows carry the reward amounts as values (all >= 0).
/// Immutable after construction, so a model can be shared across threads.
class MdpModel {
public:
    struct Row {
        Distribution transition;
        Distribution reward;
    };

    /// `rows` is indexed by s * n_actions + a; entries must be engaged exactly
    /// for the pairs listed in `feasible`.
    MdpModel(Index n_states, Index n_actions, double gamma, std::vector<std::vector<Index>> feasible,
             std::vector<std::optional<Row>> rows);

    Index n_states() const { return n_states_; }
    Index n_actions() const { return n_actions_; }
    double gamma() const { return gamma_; }

    const std::vector<Index>& feasible_actions(Index s) const { return feasible_[static_cast<std::size_t>(s)]; }
    bool is_feasible(Index s, Index a) const { return rows_[slot(s, a)].has_value(); }
    /// Feasible pairs in row-major order (s, then a).
    const std::vector<std::pair<Index, Index>>& feasible_pairs() const { return pairs_; }

    const Distribution& transition(Index s, Index a) const { return row(s, a).transition; }
    const Distribution& reward(Index s, Index a) const { return row(s, a).reward; }

    /// Largest reward amount with positive probability.
    double r_max() const { return r_max_; }

private:
    std::size_t slot(Index s, Index a) const { return static_cast<std::size_t>(s * n_actions_ + a); }
    const Row& row(Index s, Index a) const;

    Index n_states_;
    Index n_actions_;
    double gamma_;
    std::vector<std::vector<Index>> feasible_;
    std::vector<std::optional<Row>> rows_;
    std::vector<std::pair<Index, Index>> pairs_;
    double r_max_ = 0.0;
};

/// Smallest nonzero probability over every feasible transition and reward
/// row. Reward outcomes with identical amounts are pooled first, since the
/// minimum is taken over reward values.
double min_support_probability(const MdpModel& model);

struct SupportConditionReport {
    bool holds;
    double lhs;  // p_min / 2
    double rhs;  // 1 - exp(-delta)
    double min_support_probability;
};

/// Checks p_min / 2 >= 1 - exp(-delta). Requires delta > 0.
SupportConditionReport check_support_condition(const MdpModel& model, double delta);
SupportConditionReport check_support_condition(double min_support_probability, double delta);

// JSON model format (see docs/model_format.md).
nlohmann::json model_to_json(const MdpModel& model);
MdpModel model_from_json(const nlohmann::json& doc);
MdpModel load_model(const std::string& path);
void save_model(const MdpModel& model, const std::string& path);

/// Stable 64-bit fingerprint of the serialized model.
std::uint64_t model_hash(const MdpModel& model);

}  // namespace drql

#endif  // DRQL_MDP_HPP
