#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

#include "intervalforge/predictor.hpp"

namespace intervalforge {

/// Interval 0/1-loss: 0 iff the (closed) interval contains the label.
inline double interval_01_loss(double y, const Interval& iv)
{
    if (iv.lower > iv.upper)
        throw std::invalid_argument("interval_01_loss: inverted interval; repair first");
    return (iv.lower <= y && y <= iv.upper) ? 0.0 : 1.0;
}

/// eps-insensitive loss: max{0, |y - y_hat| - eps}.
inline double eps_insensitive(double y, double y_hat, double eps)
{
    if (eps < 0.0)
        throw std::invalid_argument("eps_insensitive: eps must be nonnegative");
    return std::max(0.0, std::abs(y - y_hat) - eps);
}

/// Pinball (tilted absolute) loss at quantile level tau.
inline double pinball(double y, double y_hat, double tau)
{
    if (!(tau > 0.0 && tau < 1.0))
        throw std::invalid_argument("pinball: tau must lie in (0,1)");
    double r = y - y_hat;
    return r >= 0.0 ? tau * r : (1.0 - tau) * (-r);
}

/// Mean interval 0/1-loss over a set of (label, interval) pairs.
inline double empirical_interval_error(const Eigen::VectorXd& labels,
                                       const std::vector<Interval>& intervals)
{
    if (static_cast<std::size_t>(labels.size()) != intervals.size())
        throw std::invalid_argument("empirical_interval_error: length mismatch");
    if (labels.size() == 0)
        throw std::invalid_argument("empirical_interval_error: empty input");
    double s = 0.0;
    for (Eigen::Index i = 0; i < labels.size(); ++i)
        s += interval_01_loss(labels[i], intervals[static_cast<std::size_t>(i)]);
    return s / static_cast<double>(labels.size());
}

} // namespace intervalforge
