#include "drql/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "drql/errors.hpp"

namespace drql {

namespace {

std::string pair_name(Index s, Index a) { return "(" + std::to_string(s) + ", " + std::to_string(a) + ")"; }

}  // namespace

MdpModel::MdpModel(Index n_states, Index n_actions, double gamma, std::vector<std::vector<Index>> feasible,
                   std::vector<std::optional<Row>> rows)
    : n_states_(n_states), n_actions_(n_actions), gamma_(gamma), feasible_(std::move(feasible)), rows_(std::move(rows)) {
    if (n_states_ < 1 || n_actions_ < 1) {
        throw std::invalid_argument("MdpModel: state and action counts must be positive");
    }
    if (!(gamma_ > 0.0 && gamma_ < 1.0)) {
        throw std::invalid_argument("MdpModel: gamma must lie in (0, 1)");
    }
    if (static_cast<Index>(feasible_.size()) != n_states_) {
        throw std::invalid_argument("MdpModel: feasible list needs one entry per state");
    }
    if (static_cast<Index>(rows_.size()) != n_states_ * n_actions_) {
        throw std::invalid_argument("MdpModel: rows must have n_states * n_actions entries");
    }

    std::vector<bool> listed(rows_.size(), false);
    for (Index s = 0; s < n_states_; ++s) {
        auto& actions = feasible_[static_cast<std::size_t>(s)];
        if (actions.empty()) {
            throw std::invalid_argument("MdpModel: state " + std::to_string(s) + " has no feasible action");
        }
        std::sort(actions.begin(), actions.end());
        for (Index a : actions) {
            if (a < 0 || a >= n_actions_) {
                throw std::invalid_argument("MdpModel: action index out of range in state " + std::to_string(s));
            }
            if (listed[slot(s, a)]) {
                throw std::invalid_argument("MdpModel: duplicate feasible action " + pair_name(s, a));
            }
            listed[slot(s, a)] = true;
        }
    }

    for (Index s = 0; s < n_states_; ++s) {
        for (Index a = 0; a < n_actions_; ++a) {
            const auto& row = rows_[slot(s, a)];
            if (listed[slot(s, a)] != row.has_value()) {
                throw std::invalid_argument("MdpModel: rows and feasible list disagree at " + pair_name(s, a));
            }
            if (!row) {
                continue;
            }
            for (Index next : row->transition.outcomes()) {
                if (next < 0 || next >= n_states_) {
                    throw std::invalid_argument("MdpModel: next state out of range at " + pair_name(s, a));
                }
            }
            if (!row->reward.has_values()) {
                throw std::invalid_argument("MdpModel: reward row without values at " + pair_name(s, a));
            }
            const auto& values = row->reward.values();
            const auto& probs = row->reward.probs();
            for (Index i = 0; i < values.size(); ++i) {
                if (values[i] < 0.0) {
                    throw std::invalid_argument("MdpModel: negative reward at " + pair_name(s, a));
                }
                if (probs[i] > 0.0) {
                    r_max_ = std::max(r_max_, values[i]);
                }
            }
            pairs_.emplace_back(s, a);
        }
    }
}

const MdpModel::Row& MdpModel::row(Index s, Index a) const {
    if (s < 0 || s >= n_states_ || a < 0 || a >= n_actions_ || !rows_[slot(s, a)]) {
        throw std::invalid_argument("MdpModel: infeasible pair " + pair_name(s, a));
    }
    return *rows_[slot(s, a)];
}

double min_support_probability(const MdpModel& model) {
    double best = 1.0;
    for (const auto& [s, a] : model.feasible_pairs()) {
        best = std::min(best, model.transition(s, a).min_positive_prob());
        const auto& reward = model.reward(s, a);
        std::map<double, double> pooled;
        for (Index i = 0; i < reward.size(); ++i) {
            pooled[reward.values()[i]] += reward.probs()[i];
        }
        for (const auto& [value, prob] : pooled) {
            if (prob > 0.0) {
                best = std::min(best, prob);
            }
        }
    }
    return best;
}

SupportConditionReport check_support_condition(double p_min, double delta) {
    if (!(delta > 0.0)) {
        throw std::invalid_argument("check_support_condition: delta must be > 0");
    }
    const double lhs = 0.5 * p_min;
    const double rhs = -std::expm1(-delta);
    return {lhs >= rhs, lhs, rhs, p_min};
}

SupportConditionReport check_support_condition(const MdpModel& model, double delta) {
    return check_support_condition(min_support_probability(model), delta);
}

namespace {

nlohmann::json vector_json(const Eigen::VectorXd& v) {
    auto out = nlohmann::json::array();
    for (Index i = 0; i < v.size(); ++i) {
        out.push_back(v[i]);
    }
    return out;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j, const char* what) {
    if (!j.is_array()) {
        throw std::invalid_argument(std::string("model JSON: '") + what + "' must be an array");
    }
    Eigen::VectorXd v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v[static_cast<Index>(i)] = j[i].get<double>();
    }
    return v;
}

}  // namespace

nlohmann::json model_to_json(const MdpModel& model) {
    nlohmann::json doc;
    doc["n_states"] = model.n_states();
    doc["n_actions"] = model.n_actions();
    doc["gamma"] = model.gamma();
    auto feasible = nlohmann::json::array();
    auto transitions = nlohmann::json::array();
    auto rewards = nlohmann::json::array();
    for (Index s = 0; s < model.n_states(); ++s) {
        feasible.push_back(model.feasible_actions(s));
        auto t_row = nlohmann::json::array();
        auto r_row = nlohmann::json::array();
        for (Index a = 0; a < model.n_actions(); ++a) {
            if (!model.is_feasible(s, a)) {
                t_row.push_back(nullptr);
                r_row.push_back(nullptr);
                continue;
            }
            const auto& t = model.transition(s, a);
            const auto& r = model.reward(s, a);
            t_row.push_back({{"next_states", t.outcomes()}, {"probs", vector_json(t.probs())}});
            r_row.push_back({{"values", vector_json(r.values())}, {"probs", vector_json(r.probs())}});
        }
        transitions.push_back(std::move(t_row));
        rewards.push_back(std::move(r_row));
    }
    doc["feasible"] = std::move(feasible);
    doc["transitions"] = std::move(transitions);
    doc["rewards"] = std::move(rewards);
    return doc;
}

MdpModel model_from_json(const nlohmann::json& doc) {
    try {
        const Index n_states = doc.at("n_states").get<Index>();
        const Index n_actions = doc.at("n_actions").get<Index>();
        const double gamma = doc.at("gamma").get<double>();
        const auto& transitions = doc.at("transitions");
        const auto& rewards = doc.at("rewards");
        if (n_states < 1 || n_actions < 1) {
            throw std::invalid_argument("model JSON: n_states and n_actions must be positive");
        }
        if (transitions.size() != static_cast<std::size_t>(n_states) ||
            rewards.size() != static_cast<std::size_t>(n_states)) {
            throw std::invalid_argument("model JSON: transitions/rewards need one entry per state");
        }

        std::vector<std::vector<Index>> feasible;
        if (doc.contains("feasible")) {
            feasible = doc.at("feasible").get<std::vector<std::vector<Index>>>();
        } else {
            feasible.assign(static_cast<std::size_t>(n_states), {});
            for (Index s = 0; s < n_states; ++s) {
                for (Index a = 0; a < n_actions; ++a) {
                    feasible[static_cast<std::size_t>(s)].push_back(a);
                }
            }
        }

        std::vector<std::optional<MdpModel::Row>> rows(static_cast<std::size_t>(n_states * n_actions));
        for (Index s = 0; s < n_states; ++s) {
            const auto& t_row = transitions[static_cast<std::size_t>(s)];
            const auto& r_row = rewards[static_cast<std::size_t>(s)];
            if (t_row.size() != static_cast<std::size_t>(n_actions) || r_row.size() != static_cast<std::size_t>(n_actions)) {
                throw std::invalid_argument("model JSON: state " + std::to_string(s) + " needs one row per action");
            }
            for (Index a = 0; a < n_actions; ++a) {
                const auto& t = t_row[static_cast<std::size_t>(a)];
                const auto& r = r_row[static_cast<std::size_t>(a)];
                if (t.is_null() && r.is_null()) {
                    continue;
                }
                if (t.is_null() || r.is_null()) {
                    throw std::invalid_argument("model JSON: transition and reward rows must both be present at (" +
                                                std::to_string(s) + ", " + std::to_string(a) + ")");
                }
                Distribution transition(t.at("next_states").get<std::vector<Index>>(),
                                        vector_from_json(t.at("probs"), "probs"));
                Eigen::VectorXd values = vector_from_json(r.at("values"), "values");
                std::vector<Index> labels(static_cast<std::size_t>(values.size()));
                for (std::size_t i = 0; i < labels.size(); ++i) {
                    labels[i] = static_cast<Index>(i);
                }
                Distribution reward(std::move(labels), vector_from_json(r.at("probs"), "probs"), std::move(values));
                rows[static_cast<std::size_t>(s * n_actions + a)] = MdpModel::Row{std::move(transition), std::move(reward)};
            }
        }
        return MdpModel(n_states, n_actions, gamma, std::move(feasible), std::move(rows));
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("model JSON: ") + e.what());
    }
}

MdpModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open model file '" + path + "'");
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("cannot parse model file '" + path + "': " + e.what());
    }
    return model_from_json(doc);
}

void save_model(const MdpModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write model file '" + path + "'");
    }
    out << model_to_json(model).dump(2) << '\n';
}

std::uint64_t model_hash(const MdpModel& model) {
    // FNV-1a over the compact serialization
    const std::string text = model_to_json(model).dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace drql
