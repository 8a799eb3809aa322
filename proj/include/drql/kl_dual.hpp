#ifndef DRQL_KL_DUAL_HPP
#define DRQL_KL_DUAL_HPP

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace drql {

/// Worst-case expectation over a KL ball, in dual form:
///
///   sup_{alpha >= 0}  -alpha * log E_mu[exp(-u / alpha)] - alpha * delta
///
/// `weights` describe mu over a finite support. They need not be normalized
/// (empirical counts are fine); entries with zero weight are outside the
/// support and their payoffs are ignored.
template <typename Scalar>
struct DualProblem {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Vector weights;
    Vector payoff;
    Scalar delta = Scalar(0);
};

template <typename Scalar>
struct DualSolution {
    Scalar value;
    /// Maximizing multiplier. +inf when delta == 0 (the ball is {mu}).
    Scalar alpha_star;
    /// True when the optimum sits at alpha = 0 (value is the essential infimum).
    bool at_boundary;
};

struct GoldenSectionOptions {
    double alpha_tolerance = 1e-10;
    int max_iterations = 200;
};

namespace detail {

template <typename Scalar>
struct SupportSummary {
    Scalar total_weight = Scalar(0);
    Scalar min_payoff = std::numeric_limits<Scalar>::infinity();
    Scalar max_payoff = -std::numeric_limits<Scalar>::infinity();
    Scalar mean = Scalar(0);
    Scalar mass_at_min = Scalar(0);  // kappa: mu({u == essinf u})
};

template <typename DerivedW, typename DerivedU>
auto summarize_support(const Eigen::MatrixBase<DerivedW>& weights, const Eigen::MatrixBase<DerivedU>& payoff) {
    using Scalar = typename DerivedW::Scalar;
    if (weights.size() != payoff.size()) {
        throw std::invalid_argument("kl dual: weights and payoff sizes differ");
    }
    SupportSummary<Scalar> out;
    Scalar weighted_sum(0);
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        const Scalar w = weights[i];
        if (!(w >= Scalar(0)) || !std::isfinite(w)) {
            throw std::invalid_argument("kl dual: weights must be finite and >= 0");
        }
        if (w == Scalar(0)) {
            continue;
        }
        const Scalar u = payoff[i];
        if (!std::isfinite(u)) {
            throw std::invalid_argument("kl dual: payoff must be finite on the support");
        }
        out.total_weight += w;
        weighted_sum += w * u;
        if (u < out.min_payoff) {
            out.min_payoff = u;
        }
        if (u > out.max_payoff) {
            out.max_payoff = u;
        }
    }
    if (!(out.total_weight > Scalar(0))) {
        throw std::invalid_argument("kl dual: empty support");
    }
    out.mean = weighted_sum / out.total_weight;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        if (weights[i] > Scalar(0) && payoff[i] == out.min_payoff) {
            out.mass_at_min += weights[i];
        }
    }
    out.mass_at_min /= out.total_weight;
    return out;
}

// f(alpha) for alpha > 0, with payoffs shifted so every exponent is <= 0.
template <typename DerivedW, typename DerivedU, typename Scalar>
Scalar shifted_objective(const Eigen::MatrixBase<DerivedW>& weights, const Eigen::MatrixBase<DerivedU>& payoff,
                         const SupportSummary<Scalar>& summary, Scalar delta, Scalar alpha) {
    Scalar acc(0);
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        if (weights[i] > Scalar(0)) {
            acc += weights[i] * std::exp(-(payoff[i] - summary.min_payoff) / alpha);
        }
    }
    return summary.min_payoff - alpha * std::log(acc / summary.total_weight) - alpha * delta;
}

}  // namespace detail

/// f(mu, u, alpha) = -alpha log E_mu[exp(-u/alpha)] - alpha delta.
/// At alpha == 0 returns the limit, the essential infimum of u under mu.
template <typename DerivedW, typename DerivedU>
typename DerivedW::Scalar dual_objective(const Eigen::MatrixBase<DerivedW>& weights,
                                         const Eigen::MatrixBase<DerivedU>& payoff,
                                         typename DerivedW::Scalar delta, typename DerivedW::Scalar alpha) {
    using Scalar = typename DerivedW::Scalar;
    if (!std::isfinite(alpha) || alpha < Scalar(0)) {
        throw std::invalid_argument("dual_objective: alpha must be finite and >= 0");
    }
    const auto summary = detail::summarize_support(weights, payoff);
    if (alpha == Scalar(0)) {
        return summary.min_payoff;
    }
    return detail::shifted_objective(weights, payoff, summary, delta, alpha);
}

template <typename Scalar>
Scalar dual_objective(const DualProblem<Scalar>& problem, Scalar alpha) {
    return dual_objective(problem.weights, problem.payoff, problem.delta, alpha);
}

/// Maximizes the dual objective over alpha.
///
/// Closed-form exits come first: a constant payoff, delta == 0 (plain mean),
/// and kappa >= exp(-delta) where kappa is the mass at the minimum payoff
/// (value = essential infimum, alpha* = 0). Otherwise the objective is
/// strictly concave on (0, (max u - min u) / delta] and golden-section search
/// locates the maximizer.
template <typename DerivedW, typename DerivedU>
DualSolution<typename DerivedW::Scalar> solve_dual(const Eigen::MatrixBase<DerivedW>& weights,
                                                   const Eigen::MatrixBase<DerivedU>& payoff,
                                                   typename DerivedW::Scalar delta,
                                                   const GoldenSectionOptions& options = {}) {
    using Scalar = typename DerivedW::Scalar;
    if (!std::isfinite(delta) || delta < Scalar(0)) {
        throw std::invalid_argument("solve_dual: delta must be finite and >= 0");
    }
    const auto summary = detail::summarize_support(weights, payoff);

    if (summary.max_payoff == summary.min_payoff) {
        return {summary.min_payoff, Scalar(0), true};
    }
    if (delta == Scalar(0)) {
        return {summary.mean, std::numeric_limits<Scalar>::infinity(), false};
    }
    if (summary.mass_at_min >= std::exp(-delta)) {
        return {summary.min_payoff, Scalar(0), true};
    }

    // Payoffs enter shifted by min u, so the range plays the role of ||u||.
    const Scalar inv_phi = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
    Scalar lo(0);
    Scalar hi = (summary.max_payoff - summary.min_payoff) / delta;
    Scalar x1 = hi - inv_phi * (hi - lo);
    Scalar x2 = lo + inv_phi * (hi - lo);
    auto f = [&](Scalar alpha) { return detail::shifted_objective(weights, payoff, summary, delta, alpha); };
    Scalar f1 = f(x1);
    Scalar f2 = f(x2);
    for (int it = 0; it < options.max_iterations && (hi - lo) > Scalar(options.alpha_tolerance); ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    if (f1 >= f2) {
        return {f1, x1, false};
    }
    return {f2, x2, false};
}

template <typename Scalar>
DualSolution<Scalar> solve_dual(const DualProblem<Scalar>& problem, const GoldenSectionOptions& options = {}) {
    return solve_dual(problem.weights, problem.payoff, problem.delta, options);
}

}  // namespace drql

#endif  // DRQL_KL_DUAL_HPP
