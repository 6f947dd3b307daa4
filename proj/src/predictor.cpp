#include "intervalforge/predictor.hpp"

namespace intervalforge {

namespace {
void require_finite(const Eigen::VectorXd& v, const char* what)
{
    if (!v.allFinite())
        throw std::invalid_argument(std::string(what) + ": non-finite entries");
}
} // namespace

CenterSizeModel::CenterSizeModel(Eigen::VectorXd w_, double b_, Eigen::VectorXd v_, double a_)
    : w(std::move(w_)), b(b_), v(std::move(v_)), a(a_)
{
    require_finite(w, "CenterSizeModel.w");
    require_finite(v, "CenterSizeModel.v");
    if (!std::isfinite(b) || !std::isfinite(a))
        throw std::invalid_argument("CenterSizeModel: non-finite bias");
    if (w.size() != v.size())
        throw std::invalid_argument("CenterSizeModel: w/v dimension mismatch");
}

Interval CenterSizeModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const
{
    if (x.size() != w.size())
        throw std::invalid_argument("CenterSizeModel::predict: dimension mismatch");
    double yh = w.dot(x) + b;
    double dh = v.dot(x) + a;
    if (dh < 0.0)
        return Interval{yh, yh}; // point-prediction fallback
    return Interval{yh - dh / 2.0, yh + dh / 2.0};
}

BoundaryModel::BoundaryModel(Eigen::VectorXd wl, double cl, Eigen::VectorXd wu, double cu)
    : w_l(std::move(wl)), c_l(cl), w_u(std::move(wu)), c_u(cu)
{
    require_finite(w_l, "BoundaryModel.w_l");
    require_finite(w_u, "BoundaryModel.w_u");
    if (!std::isfinite(c_l) || !std::isfinite(c_u))
        throw std::invalid_argument("BoundaryModel: non-finite bias");
    if (w_l.size() != w_u.size())
        throw std::invalid_argument("BoundaryModel: dimension mismatch");
}

Interval BoundaryModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const
{
    if (x.size() != w_l.size())
        throw std::invalid_argument("BoundaryModel::predict: dimension mismatch");
    double lo = w_l.dot(x) + c_l;
    double hi = w_u.dot(x) + c_u;
    if (lo > hi) {
        double mid = (lo + hi) / 2.0;
        return Interval{mid, mid};
    }
    return Interval{lo, hi};
}

CenterSizeModel boundary_to_center_size(const BoundaryModel& m)
{
    return CenterSizeModel((m.w_l + m.w_u) / 2.0, (m.c_l + m.c_u) / 2.0,
                           m.w_u - m.w_l, m.c_u - m.c_l);
}

BoundaryModel center_size_to_boundary(const CenterSizeModel& m)
{
    return BoundaryModel(m.w - m.v / 2.0, m.b - m.a / 2.0,
                         m.w + m.v / 2.0, m.b + m.a / 2.0);
}

} // namespace intervalforge
