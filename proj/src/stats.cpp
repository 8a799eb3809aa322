#include "drql/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace drql {

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("least_squares: need at least two paired points");
    }
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) {
        throw std::invalid_argument("least_squares: degenerate regression (constant x)");
    }
    const double slope = sxy / sxx;
    const double r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return {slope, my - slope * mx, r2};
}

AggregateCurve aggregate(std::span<const TrajectoryRecord> records) {
    if (records.size() < 2) {
        throw std::invalid_argument("aggregate: need at least two trajectories");
    }
    const std::size_t len = records.front().errors.size();
    for (const auto& r : records) {
        if (r.errors.size() != len || r.cumulative_draws.size() != len) {
            throw std::invalid_argument("aggregate: trajectories have mismatched or missing error records");
        }
    }
    const double m = static_cast<double>(records.size());
    AggregateCurve curve;
    curve.mean_error.assign(len, 0.0);
    curve.stderr_error.assign(len, 0.0);
    curve.mean_cum_draws.assign(len, 0.0);
    for (std::size_t k = 0; k < len; ++k) {
        double sum = 0.0;
        double draws = 0.0;
        for (const auto& r : records) {
            sum += r.errors[k];
            draws += static_cast<double>(r.cumulative_draws[k]);
        }
        const double mean = sum / m;
        double ss = 0.0;
        for (const auto& r : records) {
            ss += (r.errors[k] - mean) * (r.errors[k] - mean);
        }
        curve.mean_error[k] = mean;
        curve.stderr_error[k] = std::sqrt(ss / (m - 1.0) / m);
        curve.mean_cum_draws[k] = draws / m;
    }
    return curve;
}

namespace {

LineFit fit_lg_error(const AggregateCurve& curve, std::size_t first, std::size_t last, bool log_x) {
    if (first > last || last >= curve.size() || (log_x && first == 0)) {
        throw std::invalid_argument("slope fit: iteration window out of range");
    }
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t k = first; k <= last; ++k) {
        x.push_back(log_x ? std::log10(static_cast<double>(k)) : static_cast<double>(k));
        y.push_back(std::log10(curve.mean_error[k]));
    }
    return least_squares(x, y);
}

}  // namespace

LineFit loglog_slope(const AggregateCurve& curve, std::size_t first, std::size_t last) {
    return fit_lg_error(curve, first, last, true);
}

LineFit semilog_slope(const AggregateCurve& curve, std::size_t first, std::size_t last) {
    return fit_lg_error(curve, first, last, false);
}

std::optional<double> interpolate(std::span<const double> xs, std::span<const double> ys, double x) {
    if (xs.empty() || xs.size() != ys.size() || x < xs.front() || x > xs.back()) {
        return std::nullopt;
    }
    auto it = std::lower_bound(xs.begin(), xs.end(), x);
    const auto hi = static_cast<std::size_t>(it - xs.begin());
    if (xs[hi] == x || hi == 0) {
        return ys[hi];
    }
    const std::size_t lo = hi - 1;
    const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + t * (ys[hi] - ys[lo]);
}

std::uint64_t histogram_median(const std::map<std::uint64_t, std::uint64_t>& histogram) {
    std::uint64_t total = 0;
    for (const auto& [value, count] : histogram) {
        total += count;
    }
    if (total == 0) {
        throw std::invalid_argument("histogram_median: empty histogram");
    }
    const std::uint64_t rank = (total + 1) / 2;
    std::uint64_t seen = 0;
    for (const auto& [value, count] : histogram) {
        seen += count;
        if (seen >= rank) {
            return value;
        }
    }
    return histogram.rbegin()->first;
}

std::vector<SmoothedPoint> smooth_by_error(std::span<const double> lg_errors, std::span<const double> draws,
                                           double window) {
    if (lg_errors.size() != draws.size()) {
        throw std::invalid_argument("smooth_by_error: size mismatch");
    }
    if (!(window >= 0.0)) {
        throw std::invalid_argument("smooth_by_error: window must be >= 0");
    }
    std::vector<std::size_t> order(lg_errors.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return lg_errors[i] < lg_errors[j]; });

    std::vector<SmoothedPoint> out(order.size());
    std::size_t hi = 0;
    double sum = 0.0;
    for (std::size_t lo = 0; lo < order.size(); ++lo) {
        if (hi < lo) {
            hi = lo;
            sum = 0.0;
        }
        while (hi < order.size() && lg_errors[order[hi]] - lg_errors[order[lo]] <= window) {
            sum += draws[order[hi]];
            ++hi;
        }
        out[lo] = {lg_errors[order[lo]], sum / static_cast<double>(hi - lo)};
        sum -= draws[order[lo]];
    }
    return out;
}

}  // namespace drql
