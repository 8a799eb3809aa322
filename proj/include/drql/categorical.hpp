#ifndef DRQL_CATEGORICAL_HPP
#define DRQL_CATEGORICAL_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "drql/rng.hpp"

namespace drql {

using Index = Eigen::Index;

/// Finite distribution over indexed outcomes, optionally carrying a real
/// payload per outcome (reward amounts for reward laws).
///
/// Positions 0..size()-1 address the stored entries; outcome(i) is the label
/// attached to position i (a next-state index for transition rows).
/// Construction validates the weights: each must be >= 0, and the total must
/// be within 1e-12 of one. Totals off by at most 1e-9 are renormalized once;
/// anything further is rejected.
template <typename Scalar>
class Categorical {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    static constexpr double kSumTolerance = 1e-12;
    static constexpr double kRenormalizeTolerance = 1e-9;

    Categorical(std::vector<Index> outcomes, Vector probs, std::optional<Vector> values = std::nullopt)
        : outcomes_(std::move(outcomes)), probs_(std::move(probs)), values_(std::move(values)) {
        const auto n = static_cast<Index>(outcomes_.size());
        if (n < 1) {
            throw std::invalid_argument("Categorical: needs at least one outcome");
        }
        if (probs_.size() != n || (values_ && values_->size() != n)) {
            throw std::invalid_argument("Categorical: outcomes, probs and values must have equal length");
        }
        for (Index i = 0; i < n; ++i) {
            if (!std::isfinite(probs_[i]) || probs_[i] < Scalar(0)) {
                throw std::invalid_argument("Categorical: probabilities must be finite and >= 0");
            }
            if (values_ && !std::isfinite((*values_)[i])) {
                throw std::invalid_argument("Categorical: values must be finite");
            }
        }
        const Scalar total = probs_.sum();
        const Scalar gap = std::abs(total - Scalar(1));
        if (gap > Scalar(kRenormalizeTolerance)) {
            throw std::invalid_argument("Categorical: probabilities sum to " + std::to_string(double(total)));
        }
        if (gap > Scalar(kSumTolerance)) {
            probs_ /= total;
        }
        cumulative_.resize(n);
        Scalar acc(0);
        for (Index i = 0; i < n; ++i) {
            acc += probs_[i];
            cumulative_[i] = acc;
        }
        last_positive_ = n - 1;
        while (last_positive_ > 0 && probs_[last_positive_] == Scalar(0)) {
            --last_positive_;
        }
    }

    static Categorical point_mass(Index outcome) { return Categorical({outcome}, Vector::Ones(1)); }

    static Categorical point_mass_value(Scalar value) {
        return Categorical({0}, Vector::Ones(1), Vector::Constant(1, value));
    }

    Index size() const { return static_cast<Index>(outcomes_.size()); }
    const std::vector<Index>& outcomes() const { return outcomes_; }
    Index outcome(Index position) const { return outcomes_[static_cast<std::size_t>(position)]; }
    const Vector& probs() const { return probs_; }
    bool has_values() const { return values_.has_value(); }
    const Vector& values() const {
        if (!values_) {
            throw std::logic_error("Categorical: no values attached");
        }
        return *values_;
    }

    /// Smallest strictly positive probability.
    Scalar min_positive_prob() const {
        Scalar best(1);
        for (Index i = 0; i < probs_.size(); ++i) {
            if (probs_[i] > Scalar(0)) {
                best = std::min(best, probs_[i]);
            }
        }
        return best;
    }

    /// Draws a position by inverse CDF.
    Index sample_position(RngStream& rng) const {
        const Scalar u = static_cast<Scalar>(rng.uniform());
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        const Index pos = static_cast<Index>(it - cumulative_.begin());
        // u can land at or above the last cumulative value through rounding
        return std::min(pos, last_positive_);
    }

    Index sample(RngStream& rng) const { return outcome(sample_position(rng)); }

private:
    std::vector<Index> outcomes_;
    Vector probs_;
    std::optional<Vector> values_;
    std::vector<Scalar> cumulative_;
    Index last_positive_ = 0;
};

}  // namespace drql

#endif  // DRQL_CATEGORICAL_HPP
