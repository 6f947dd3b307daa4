#pragma once

#include <Eigen/Core>
#include <vector>

namespace intervalforge {

/// Shape-constrained least-squares spline: accuracy (= 1 - error) as a
/// monotone nondecreasing, concave piecewise-cubic function of interval
/// width.  Truncated-power basis with interior knots at width quantiles;
/// concavity is enforced at the knots (the second derivative is piecewise
/// linear, so that pins it everywhere) and monotonicity via the right
/// endpoint slope.
struct ShapeSpline {
    Eigen::VectorXd coef;        // 1, t, t^2, t^3, (t-k_j)^3_+ coefficients
    Eigen::VectorXd knots;       // interior knots, normalized units
    double x_min = 0.0;          // width range seen at fit time
    double x_max = 1.0;
    double r_squared = 0.0;

    /// Fitted accuracy at a width; outside [x_min, x_max] the boundary
    /// value is returned (clamped, not extrapolated).
    double accuracy(double width) const;
    double accuracy_deriv(double width) const;
    bool clamped(double width) const { return width < x_min || width > x_max; }
};

ShapeSpline fit_accuracy_spline(const std::vector<double>& widths,
                                const std::vector<double>& accuracies,
                                int interior_knots = 5);

struct InterpolatedCurve {
    std::vector<double> errors;
    std::vector<bool> clamped;   // query fell outside the observed range
    ShapeSpline spline;
};

/// Fits accuracy = 1 - error against width and evaluates at query widths.
/// Requires at least 6 points; widths are sorted, exact ties averaged.
InterpolatedCurve interpolate_error_curve(const std::vector<double>& widths,
                                          const std::vector<double>& errors,
                                          const std::vector<double>& query_widths);

} // namespace intervalforge
