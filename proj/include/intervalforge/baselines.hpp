#pragma once

#include <cstdint>
#include <string>

#include "intervalforge/dataset.hpp"
#include "intervalforge/predictor.hpp"
#include "intervalforge/solver.hpp"

namespace intervalforge {

enum class BaselineKind { QuantReg, AbsConf, SqrConf, AbsReg, LinReg, SVR, Gaussian };

std::string to_string(BaselineKind k);
BaselineKind baseline_kind_from_string(const std::string& name);

enum class ConformalLoss { absolute, squared };

/// Split-conformal predictor: a linear point regressor fit on one half of
/// the training data plus a residual-quantile half-width calibrated on the
/// other half.
struct ConformalModel final : IntervalPredictor {
    Eigen::VectorXd w;
    double b = 0.0;
    double half_width = 0.0;    // >= 0
    int calibration_size = 0;
    ConformalLoss loss = ConformalLoss::absolute;

    Interval predict(const Eigen::Ref<const Eigen::VectorXd>& x) const override;
    int dim() const override { return static_cast<int>(w.size()); }
};

/// Eq.-1 closed form under a unit-variance Gaussian conditional:
/// mu_hat +- |ppf(alpha/2)| * sqrt((m+1)/m).
Interval gaussian_interval(double mu_hat, double alpha, Eigen::Index m);
double gaussian_half_width(double alpha, Eigen::Index m);

/// Symmetric-tail quantile regression: pinball fits at tau = alpha/2 and
/// 1 - alpha/2. Crossing boundaries are repaired at predict time.
BoundaryModel train_quantreg(const Dataset& train, double alpha, double reg);

/// Single pinball fit at level tau (exact two-row slack encoding).
std::pair<Eigen::VectorXd, double> fit_pinball(const Dataset& train, double tau, double reg);

/// Linear fit under the absolute loss (slack LP).
std::pair<Eigen::VectorXd, double> fit_absolute(const Dataset& train, double reg);

/// Ridge least squares via the normal equations.
std::pair<Eigen::VectorXd, double> fit_least_squares(const Dataset& train, double reg);

ConformalModel train_split_conformal(const Dataset& train, double alpha,
                                     ConformalLoss loss_kind, double reg,
                                     std::uint64_t seed);

/// Point regressor of the requested kind plus a constant width B
/// (v = 0, a = B). SVR uses insensitivity B/2, matching the interval
/// half-width so the surrogate stays calibrated with the 0/1 loss.
CenterSizeModel train_fixed_width(const Dataset& train, double B, BaselineKind kind,
                                  double reg);

} // namespace intervalforge
