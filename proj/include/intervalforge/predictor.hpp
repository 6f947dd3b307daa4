#pragma once

#include <Eigen/Core>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace intervalforge {

/// A (lower, upper) prediction interval. Construct via make() to enforce
/// lower <= upper; degenerate model outputs go through the repair rule in
/// predict() instead.
struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    static Interval make(double lo, double hi)
    {
        if (lo > hi)
            throw std::invalid_argument("Interval: lower > upper");
        return Interval{lo, hi};
    }
    double width() const { return upper - lower; }
    bool contains(double y) const { return lower <= y && y <= upper; }
};

/// Abstract interval predictor: every trained method (IntPred and all
/// baselines) exposes this contract, so evaluation code is method-agnostic.
class IntervalPredictor {
public:
    virtual ~IntervalPredictor() = default;
    virtual Interval predict(const Eigen::Ref<const Eigen::VectorXd>& x) const = 0;
    virtual int dim() const = 0;
};

/// Center/size parameterization: y_hat = <w,x>+b, width_hat = <v,x>+a.
/// A negative predicted width collapses to the point interval [y_hat, y_hat].
struct CenterSizeModel final : IntervalPredictor {
    Eigen::VectorXd w;
    double b = 0.0;
    Eigen::VectorXd v;
    double a = 0.0;

    CenterSizeModel() = default;
    CenterSizeModel(Eigen::VectorXd w_, double b_, Eigen::VectorXd v_, double a_);

    Interval predict(const Eigen::Ref<const Eigen::VectorXd>& x) const override;
    int dim() const override { return static_cast<int>(w.size()); }

    double center(const Eigen::Ref<const Eigen::VectorXd>& x) const { return w.dot(x) + b; }
    double width(const Eigen::Ref<const Eigen::VectorXd>& x) const { return v.dot(x) + a; }
};

/// Boundary parameterization: lower = <w_l,x>+c_l, upper = <w_u,x>+c_u.
/// Crossing boundaries collapse to the midpoint at prediction time.
struct BoundaryModel final : IntervalPredictor {
    Eigen::VectorXd w_l;
    double c_l = 0.0;
    Eigen::VectorXd w_u;
    double c_u = 0.0;

    BoundaryModel() = default;
    BoundaryModel(Eigen::VectorXd wl, double cl, Eigen::VectorXd wu, double cu);

    Interval predict(const Eigen::Ref<const Eigen::VectorXd>& x) const override;
    int dim() const override { return static_cast<int>(w_l.size()); }
};

CenterSizeModel boundary_to_center_size(const BoundaryModel& m);
BoundaryModel center_size_to_boundary(const CenterSizeModel& m);

} // namespace intervalforge
