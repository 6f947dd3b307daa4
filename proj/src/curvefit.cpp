#include "intervalforge/curvefit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "intervalforge/qp.hpp"

namespace intervalforge {

namespace {

// Shape margin: constraints are imposed with this slack so that solver
// feasibility error cannot leak into a sign violation on the check grid.
constexpr double kShapeMargin = 1e-8;

double pos3(double t) { return t > 0.0 ? t * t * t : 0.0; }
double pos2(double t) { return t > 0.0 ? t * t : 0.0; }
double pos1(double t) { return t > 0.0 ? t : 0.0; }

Eigen::VectorXd basis_row(double t, const Eigen::VectorXd& knots)
{
    Eigen::VectorXd r(4 + knots.size());
    r[0] = 1.0; r[1] = t; r[2] = t * t; r[3] = t * t * t;
    for (Eigen::Index j = 0; j < knots.size(); ++j)
        r[4 + j] = pos3(t - knots[j]);
    return r;
}

Eigen::VectorXd basis_deriv(double t, const Eigen::VectorXd& knots)
{
    Eigen::VectorXd r(4 + knots.size());
    r[0] = 0.0; r[1] = 1.0; r[2] = 2.0 * t; r[3] = 3.0 * t * t;
    for (Eigen::Index j = 0; j < knots.size(); ++j)
        r[4 + j] = 3.0 * pos2(t - knots[j]);
    return r;
}

Eigen::VectorXd basis_deriv2(double t, const Eigen::VectorXd& knots)
{
    Eigen::VectorXd r(4 + knots.size());
    r[0] = 0.0; r[1] = 0.0; r[2] = 2.0; r[3] = 6.0 * t;
    for (Eigen::Index j = 0; j < knots.size(); ++j)
        r[4 + j] = 6.0 * pos1(t - knots[j]);
    return r;
}

} // namespace

double ShapeSpline::accuracy(double width) const
{
    double span = x_max - x_min;
    double t = (std::clamp(width, x_min, x_max) - x_min) / span;
    return basis_row(t, knots).dot(coef);
}

double ShapeSpline::accuracy_deriv(double width) const
{
    double span = x_max - x_min;
    double t = (std::clamp(width, x_min, x_max) - x_min) / span;
    return basis_deriv(t, knots).dot(coef) / span;
}

ShapeSpline fit_accuracy_spline(const std::vector<double>& widths,
                                const std::vector<double>& accuracies,
                                int interior_knots)
{
    if (widths.size() != accuracies.size())
        throw std::invalid_argument("fit_accuracy_spline: length mismatch");
    if (widths.size() < 6)
        throw std::invalid_argument("fit_accuracy_spline: need at least 6 points");
    for (std::size_t i = 0; i < widths.size(); ++i)
        if (!std::isfinite(widths[i]) || !std::isfinite(accuracies[i]))
            throw std::invalid_argument("fit_accuracy_spline: non-finite input");

    std::vector<std::pair<double, double>> pts(widths.size());
    for (std::size_t i = 0; i < widths.size(); ++i)
        pts[i] = {widths[i], accuracies[i]};
    std::sort(pts.begin(), pts.end());

    ShapeSpline fit;
    fit.x_min = pts.front().first;
    fit.x_max = pts.back().first;
    double span = fit.x_max - fit.x_min;
    if (!(span > 0.0))
        throw std::invalid_argument("fit_accuracy_spline: degenerate width range");

    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::VectorXd t(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        t[i] = (pts[static_cast<std::size_t>(i)].first - fit.x_min) / span;
        y[i] = pts[static_cast<std::size_t>(i)].second;
    }

    // interior knots at data quantiles
    fit.knots.resize(interior_knots);
    for (int j = 0; j < interior_knots; ++j) {
        double q = static_cast<double>(j + 1) / (interior_knots + 1);
        double pos = q * static_cast<double>(n - 1);
        auto lo = static_cast<Eigen::Index>(std::floor(pos));
        auto hi = std::min(lo + 1, n - 1);
        fit.knots[j] = t[lo] + (pos - static_cast<double>(lo)) * (t[hi] - t[lo]);
    }

    const Eigen::Index p = 4 + fit.knots.size();
    Eigen::MatrixXd Phi(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        Phi.row(i) = basis_row(t[i], fit.knots).transpose();

    ConvexProgram qp;
    qp.n = p;
    Eigen::MatrixXd Qd = 2.0 * Phi.transpose() * Phi;
    Qd.diagonal().array() += 1e-9; // conditioning
    qp.Q = Qd.sparseView();
    qp.c = -2.0 * Phi.transpose() * y;

    RowBuilder rb(p);
    auto le_row = [&](const Eigen::VectorXd& g, double rhs) {
        std::vector<std::pair<Eigen::Index, double>> r;
        for (Eigen::Index j = 0; j < p; ++j)
            if (g[j] != 0.0) r.push_back({j, g[j]});
        rb.add_row(r, rhs);
    };
    // concavity: a''(t) <= -margin at 0, all knots, and 1
    le_row(basis_deriv2(0.0, fit.knots), -kShapeMargin);
    for (Eigen::Index j = 0; j < fit.knots.size(); ++j)
        le_row(basis_deriv2(fit.knots[j], fit.knots), -kShapeMargin);
    le_row(basis_deriv2(1.0, fit.knots), -kShapeMargin);
    // monotonicity: a'(1) >= margin (with concavity this pins a' >= 0 on [0,1])
    le_row(-basis_deriv(1.0, fit.knots), -kShapeMargin);
    qp.G = rb.matrix();
    qp.h = rb.rhs();

    QpResult res = solve_qp(qp, 1e-10, 1e-10, 200);
    fit.coef = res.x;

    Eigen::VectorXd resid = Phi * fit.coef - y;
    double ss_tot = (y.array() - y.mean()).square().sum();
    fit.r_squared = (ss_tot > 0.0) ? 1.0 - resid.squaredNorm() / ss_tot : 1.0;
    return fit;
}

InterpolatedCurve interpolate_error_curve(const std::vector<double>& widths,
                                          const std::vector<double>& errors,
                                          const std::vector<double>& query_widths)
{
    if (widths.size() != errors.size())
        throw std::invalid_argument("interpolate_error_curve: length mismatch");
    for (std::size_t i = 0; i < widths.size(); ++i) {
        if (!std::isfinite(widths[i]) || !std::isfinite(errors[i]))
            throw std::invalid_argument("interpolate_error_curve: non-finite input");
        if (widths[i] <= 0.0)
            throw std::invalid_argument("interpolate_error_curve: widths must be positive");
    }

    // exact width ties averaged
    std::map<double, std::pair<double, int>> agg;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        auto& slot = agg[widths[i]];
        slot.first += 1.0 - errors[i];
        slot.second += 1;
    }
    std::vector<double> ws, accs;
    for (const auto& [w, acc] : agg) {
        ws.push_back(w);
        accs.push_back(acc.first / acc.second);
    }
    if (ws.size() < 6)
        throw std::invalid_argument("interpolate_error_curve: need at least 6 distinct points");

    InterpolatedCurve out;
    out.spline = fit_accuracy_spline(ws, accs);
    out.errors.reserve(query_widths.size());
    out.clamped.reserve(query_widths.size());
    for (double q : query_widths) {
        double acc = out.spline.accuracy(q);
        out.errors.push_back(std::clamp(1.0 - acc, 0.0, 1.0));
        out.clamped.push_back(out.spline.clamped(q));
    }
    return out;
}

} // namespace intervalforge
