#ifndef DRQL_STATS_HPP
#define DRQL_STATS_HPP

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "drql/q_learning.hpp"

namespace drql {

struct LineFit {
    double slope;
    double intercept;
    double r_squared;
};

/// Ordinary least squares y = slope * x + intercept. Throws
/// std::invalid_argument when x is constant or fewer than two points.
LineFit least_squares(std::span<const double> x, std::span<const double> y);

/// Per-iteration statistics over trajectories.
struct AggregateCurve {
    std::vector<double> mean_error;
    std::vector<double> stderr_error;
    std::vector<double> mean_cum_draws;

    std::size_t size() const { return mean_error.size(); }
};

/// Needs at least two trajectories with error records of equal length.
AggregateCurve aggregate(std::span<const TrajectoryRecord> records);

/// Fit of lg(mean error) against lg(k) for k in [first, last].
LineFit loglog_slope(const AggregateCurve& curve, std::size_t first, std::size_t last);

/// Fit of lg(mean error) against k for k in [first, last].
LineFit semilog_slope(const AggregateCurve& curve, std::size_t first, std::size_t last);

/// Piecewise-linear y(x) on increasing xs; nullopt outside [xs.front(), xs.back()].
std::optional<double> interpolate(std::span<const double> xs, std::span<const double> ys, double x);

/// Median of a value -> count histogram (lower median).
std::uint64_t histogram_median(const std::map<std::uint64_t, std::uint64_t>& histogram);

struct SmoothedPoint {
    double lg_error;
    double mean_draws;
};

/// Error-window smoothing of (draws, lg error) scatter points: each point's
/// draw count is replaced by the mean draw count of all points whose
/// lg error lies in [e, e + window]. Output is sorted by lg error.
std::vector<SmoothedPoint> smooth_by_error(std::span<const double> lg_errors, std::span<const double> draws,
                                           double window);

}  // namespace drql

#endif  // DRQL_STATS_HPP
