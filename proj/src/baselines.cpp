#include "intervalforge/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "intervalforge/stats.hpp"

namespace intervalforge {

std::string to_string(BaselineKind k)
{
    switch (k) {
    case BaselineKind::QuantReg: return "quantreg";
    case BaselineKind::AbsConf: return "absconf";
    case BaselineKind::SqrConf: return "sqrconf";
    case BaselineKind::AbsReg: return "absreg";
    case BaselineKind::LinReg: return "linreg";
    case BaselineKind::SVR: return "svr";
    case BaselineKind::Gaussian: return "gaussian";
    }
    throw std::logic_error("to_string: bad BaselineKind");
}

BaselineKind baseline_kind_from_string(const std::string& name)
{
    if (name == "quantreg") return BaselineKind::QuantReg;
    if (name == "absconf") return BaselineKind::AbsConf;
    if (name == "sqrconf") return BaselineKind::SqrConf;
    if (name == "absreg") return BaselineKind::AbsReg;
    if (name == "linreg") return BaselineKind::LinReg;
    if (name == "svr") return BaselineKind::SVR;
    if (name == "gaussian") return BaselineKind::Gaussian;
    throw std::invalid_argument("unknown baseline '" + name +
                                "'; valid: quantreg absconf sqrconf absreg linreg svr gaussian");
}

Interval ConformalModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const
{
    if (x.size() != w.size())
        throw std::invalid_argument("ConformalModel::predict: dimension mismatch");
    double yh = w.dot(x) + b;
    return Interval{yh - half_width, yh + half_width};
}

double gaussian_half_width(double alpha, Eigen::Index m)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("gaussian_interval: alpha must lie in (0,1)");
    if (m < 1)
        throw std::invalid_argument("gaussian_interval: m must be >= 1");
    double q = std::abs(norm_ppf(alpha / 2.0));
    return q * std::sqrt((static_cast<double>(m) + 1.0) / static_cast<double>(m));
}

Interval gaussian_interval(double mu_hat, double alpha, Eigen::Index m)
{
    double hw = gaussian_half_width(alpha, m);
    return Interval{mu_hat - hw, mu_hat + hw};
}

namespace {

// Point-fit LP layout: [ w (d) | b | xi (m) ].
struct PointFitProgram {
    ConvexProgram p;
    Eigen::Index d;
};

PointFitProgram make_point_program(const Dataset& train, double reg)
{
    const Eigen::Index d = train.cols(), m = train.rows();
    PointFitProgram out;
    out.d = d;
    out.p.n = d + 1 + m;
    out.p.c = Eigen::VectorXd::Zero(out.p.n);
    out.p.c.tail(m).setConstant(1.0 / static_cast<double>(m));
    Eigen::SparseMatrix<double> Q(out.p.n, out.p.n);
    if (reg > 0.0) {
        std::vector<Eigen::Triplet<double>> t;
        for (Eigen::Index j = 0; j < d; ++j)
            t.emplace_back(static_cast<int>(j), static_cast<int>(j), 2.0 * reg);
        Q.setFromTriplets(t.begin(), t.end());
    }
    out.p.Q = Q;
    return out;
}

std::pair<Eigen::VectorXd, double> run_point_fit(PointFitProgram& prog)
{
    QpResult res = solve_qp(prog.p);
    return {res.x.head(prog.d), res.x[prog.d]};
}

} // namespace

std::pair<Eigen::VectorXd, double> fit_pinball(const Dataset& train, double tau, double reg)
{
    if (!(tau > 0.0 && tau < 1.0))
        throw std::invalid_argument("fit_pinball: tau must lie in (0,1)");
    const Eigen::Index d = train.cols(), m = train.rows();
    PointFitProgram prog = make_point_program(train, reg);
    RowBuilder rb(prog.p.n);
    for (Eigen::Index i = 0; i < m; ++i) {
        std::vector<std::pair<Eigen::Index, double>> r1, r2;
        for (Eigen::Index j = 0; j < d; ++j) {
            double xj = train.features(i, j);
            r1.push_back({j, -tau * xj});
            r2.push_back({j, (1.0 - tau) * xj});
        }
        r1.push_back({d, -tau});
        r1.push_back({d + 1 + i, -1.0});
        r2.push_back({d, 1.0 - tau});
        r2.push_back({d + 1 + i, -1.0});
        rb.add_row(r1, -tau * train.labels[i]);
        rb.add_row(r2, (1.0 - tau) * train.labels[i]);
    }
    prog.p.G = rb.matrix();
    prog.p.h = rb.rhs();
    return run_point_fit(prog);
}

std::pair<Eigen::VectorXd, double> fit_absolute(const Dataset& train, double reg)
{
    const Eigen::Index d = train.cols(), m = train.rows();
    PointFitProgram prog = make_point_program(train, reg);
    RowBuilder rb(prog.p.n);
    for (Eigen::Index i = 0; i < m; ++i) {
        std::vector<std::pair<Eigen::Index, double>> r1, r2;
        for (Eigen::Index j = 0; j < d; ++j) {
            double xj = train.features(i, j);
            r1.push_back({j, -xj});
            r2.push_back({j, xj});
        }
        r1.push_back({d, -1.0});
        r1.push_back({d + 1 + i, -1.0});
        r2.push_back({d, 1.0});
        r2.push_back({d + 1 + i, -1.0});
        rb.add_row(r1, -train.labels[i]);
        rb.add_row(r2, train.labels[i]);
    }
    prog.p.G = rb.matrix();
    prog.p.h = rb.rhs();
    return run_point_fit(prog);
}

std::pair<Eigen::VectorXd, double> fit_least_squares(const Dataset& train, double reg)
{
    const Eigen::Index d = train.cols(), m = train.rows();
    Eigen::MatrixXd A(m, d + 1);
    A.leftCols(d) = train.features;
    A.col(d).setOnes();
    Eigen::MatrixXd M = A.transpose() * A / static_cast<double>(m);
    for (Eigen::Index j = 0; j < d; ++j)
        M(j, j) += reg;
    Eigen::VectorXd rhs = A.transpose() * train.labels / static_cast<double>(m);
    Eigen::VectorXd theta = M.ldlt().solve(rhs);
    return {theta.head(d), theta[d]};
}

BoundaryModel train_quantreg(const Dataset& train, double alpha, double reg)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("train_quantreg: alpha must lie in (0,1)");
    auto [wl, cl] = fit_pinball(train, alpha / 2.0, reg);
    auto [wu, cu] = fit_pinball(train, 1.0 - alpha / 2.0, reg);
    return BoundaryModel(std::move(wl), cl, std::move(wu), cu);
}

ConformalModel train_split_conformal(const Dataset& train, double alpha,
                                     ConformalLoss loss_kind, double reg,
                                     std::uint64_t seed)
{
    const Eigen::Index m = train.rows();
    if (m < 4)
        throw std::invalid_argument("train_split_conformal: need m >= 4");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("train_split_conformal: alpha must lie in (0,1)");

    std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    const Eigen::Index n1 = m / 2;
    std::vector<Eigen::Index> i1(idx.begin(), idx.begin() + n1);
    std::vector<Eigen::Index> i2(idx.begin() + n1, idx.end());
    std::sort(i1.begin(), i1.end());
    std::sort(i2.begin(), i2.end());
    Dataset fit_half = subset_rows(train, i1);
    Dataset cal_half = subset_rows(train, i2);

    const Eigen::Index n2 = cal_half.rows();
    const auto k = static_cast<Eigen::Index>(
        std::ceil((static_cast<double>(n2) + 1.0) * (1.0 - alpha)));
    if (k > n2)
        throw std::runtime_error(
            "train_split_conformal: insufficient calibration data (rank " +
            std::to_string(k) + " > " + std::to_string(n2) + ")");

    ConformalModel model;
    model.loss = loss_kind;
    if (loss_kind == ConformalLoss::absolute) {
        auto [w, b] = fit_absolute(fit_half, reg);
        model.w = std::move(w);
        model.b = b;
    } else {
        auto [w, b] = fit_least_squares(fit_half, reg);
        model.w = std::move(w);
        model.b = b;
    }

    std::vector<double> scores(static_cast<std::size_t>(n2));
    for (Eigen::Index i = 0; i < n2; ++i) {
        double r = cal_half.labels[i] -
                   (model.w.dot(cal_half.features.row(i)) + model.b);
        scores[static_cast<std::size_t>(i)] =
            (loss_kind == ConformalLoss::absolute) ? std::abs(r) : r * r;
    }
    std::sort(scores.begin(), scores.end());
    double thresh = scores[static_cast<std::size_t>(k - 1)];
    model.half_width =
        (loss_kind == ConformalLoss::absolute) ? thresh : std::sqrt(thresh);
    model.calibration_size = static_cast<int>(n2);
    return model;
}

CenterSizeModel train_fixed_width(const Dataset& train, double B, BaselineKind kind,
                                  double reg)
{
    if (B < 0.0)
        throw std::invalid_argument("train_fixed_width: B must be nonnegative");
    const Eigen::Index d = train.cols(), m = train.rows();
    Eigen::VectorXd w;
    double b = 0.0;
    switch (kind) {
    case BaselineKind::AbsReg: {
        auto [w_, b_] = fit_absolute(train, reg);
        w = std::move(w_); b = b_;
        break;
    }
    case BaselineKind::LinReg:
    case BaselineKind::Gaussian: {
        auto [w_, b_] = fit_least_squares(train, reg);
        w = std::move(w_); b = b_;
        break;
    }
    case BaselineKind::SVR: {
        // eps-insensitive fit with insensitivity B/2 (= interval half-width)
        const double eps = B / 2.0;
        PointFitProgram prog = make_point_program(train, reg);
        RowBuilder rb(prog.p.n);
        for (Eigen::Index i = 0; i < m; ++i) {
            std::vector<std::pair<Eigen::Index, double>> r1, r2;
            for (Eigen::Index j = 0; j < d; ++j) {
                double xj = train.features(i, j);
                r1.push_back({j, -xj});
                r2.push_back({j, xj});
            }
            r1.push_back({d, -1.0});
            r1.push_back({d + 1 + i, -1.0});
            r2.push_back({d, 1.0});
            r2.push_back({d + 1 + i, -1.0});
            rb.add_row(r1, -train.labels[i] + eps);
            rb.add_row(r2, train.labels[i] + eps);
            rb.add_row({{d + 1 + i, -1.0}}, 0.0);
        }
        prog.p.G = rb.matrix();
        prog.p.h = rb.rhs();
        auto [w_, b_] = run_point_fit(prog);
        w = std::move(w_); b = b_;
        break;
    }
    default:
        throw std::invalid_argument("train_fixed_width: kind must be absreg, linreg or svr");
    }
    return CenterSizeModel(std::move(w), b, Eigen::VectorXd::Zero(d), B);
}

} // namespace intervalforge
