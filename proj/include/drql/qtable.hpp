#ifndef DRQL_QTABLE_HPP
#define DRQL_QTABLE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "drql/mdp.hpp"

namespace drql {

/// Dense |S| x |A| action-value table plus the feasibility mask of its
/// model. Entries at infeasible pairs are kept at zero and ignored by every
/// reduction below.
template <typename Scalar>
struct QTableT {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    Matrix values;
    Mask feasible;

    static QTableT zeros(const MdpModel& model) {
        QTableT q;
        q.values = Matrix::Zero(model.n_states(), model.n_actions());
        q.feasible = Mask::Constant(model.n_states(), model.n_actions(), false);
        for (const auto& [s, a] : model.feasible_pairs()) {
            q.feasible(s, a) = true;
        }
        return q;
    }

    Index n_states() const { return values.rows(); }
    Index n_actions() const { return values.cols(); }
    Scalar operator()(Index s, Index a) const { return values(s, a); }
    Scalar& operator()(Index s, Index a) { return values(s, a); }
};

using QTable = QTableT<double>;

/// v(Q)(s) = max over feasible b of Q(s, b).
template <typename Scalar>
Scalar state_value(const QTableT<Scalar>& q, Index s) {
    Scalar best = -std::numeric_limits<Scalar>::infinity();
    for (Index a = 0; a < q.n_actions(); ++a) {
        if (q.feasible(s, a) && q.values(s, a) > best) {
            best = q.values(s, a);
        }
    }
    return best;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> state_values(const QTableT<Scalar>& q) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(q.n_states());
    for (Index s = 0; s < q.n_states(); ++s) {
        v[s] = state_value(q, s);
    }
    return v;
}

/// Sup norm over feasible entries.
template <typename Scalar>
Scalar sup_norm(const QTableT<Scalar>& q) {
    return q.feasible.select(q.values.array().abs(), Scalar(0)).maxCoeff();
}

template <typename Scalar>
Scalar sup_distance(const QTableT<Scalar>& lhs, const QTableT<Scalar>& rhs) {
    if (lhs.values.rows() != rhs.values.rows() || lhs.values.cols() != rhs.values.cols()) {
        throw std::invalid_argument("sup_distance: table shapes differ");
    }
    return lhs.feasible.select((lhs.values - rhs.values).array().abs(), Scalar(0)).maxCoeff();
}

/// Per-state argmax over feasible actions; ties go to the smallest index.
template <typename Scalar>
std::vector<Index> greedy_policy(const QTableT<Scalar>& q) {
    std::vector<Index> policy(static_cast<std::size_t>(q.n_states()), -1);
    for (Index s = 0; s < q.n_states(); ++s) {
        Scalar best = -std::numeric_limits<Scalar>::infinity();
        for (Index a = 0; a < q.n_actions(); ++a) {
            if (q.feasible(s, a) && (policy[static_cast<std::size_t>(s)] < 0 || q.values(s, a) > best)) {
                best = q.values(s, a);
                policy[static_cast<std::size_t>(s)] = a;
            }
        }
    }
    return policy;
}

/// {"n_states", "n_actions", "values": [[...], ...]} with null at infeasible
/// entries.
nlohmann::json qtable_to_json(const QTable& q);
QTable qtable_from_json(const nlohmann::json& doc);

}  // namespace drql

#endif  // DRQL_QTABLE_HPP
