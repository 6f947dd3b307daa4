#include "intervalforge/solver.hpp"

#include "intervalforge/losses.hpp"

#include <stdexcept>

namespace intervalforge {

void TrainConfig::validate() const
{
    if (budget < 0.0)
        throw std::invalid_argument("TrainConfig: budget must be nonnegative");
    if (lambda_w < 0.0 || lambda_v < 0.0)
        throw std::invalid_argument("TrainConfig: regularization must be nonnegative");
    if (!(tol_opt > 0.0) || !(tol_feas > 0.0))
        throw std::invalid_argument("TrainConfig: tolerances must be positive");
    if (max_iters < 1)
        throw std::invalid_argument("TrainConfig: max_iters must be positive");
}

namespace {

using Coeffs = std::vector<std::pair<Eigen::Index, double>>;

// Regularization enters the quadratic term as Q = 2*lambda on the weight
// coordinates (biases b, a unregularized), so 0.5 x'Qx = lambda |w|^2.
Eigen::SparseMatrix<double> reg_matrix(const ProgramLayout& L, double lw, double lv)
{
    Eigen::SparseMatrix<double> Q(L.num_vars(), L.num_vars());
    std::vector<Eigen::Triplet<double>> t;
    for (Eigen::Index j = 0; j < L.d; ++j) {
        if (lw > 0.0) t.emplace_back(static_cast<int>(L.w_off() + j),
                                     static_cast<int>(L.w_off() + j), 2.0 * lw);
        if (lv > 0.0) t.emplace_back(static_cast<int>(L.v_off() + j),
                                     static_cast<int>(L.v_off() + j), 2.0 * lv);
    }
    Q.setFromTriplets(t.begin(), t.end());
    return Q;
}

// xi_i >= |y_i - yhat_i| - width_i/2, xi_i >= 0 : three rows per example.
void add_slack_rows(RowBuilder& rb, const Dataset& train, const ProgramLayout& L)
{
    const Eigen::Index d = L.d, m = L.m;
    for (Eigen::Index i = 0; i < m; ++i) {
        Coeffs r1, r2;
        for (Eigen::Index j = 0; j < d; ++j) {
            double xj = train.features(i, j);
            r1.push_back({L.w_off() + j, -xj});
            r1.push_back({L.v_off() + j, -xj / 2.0});
            r2.push_back({L.w_off() + j, xj});
            r2.push_back({L.v_off() + j, -xj / 2.0});
        }
        r1.push_back({L.b_off(), -1.0});
        r1.push_back({L.a_off(), -0.5});
        r1.push_back({L.xi_off() + i, -1.0});
        r2.push_back({L.b_off(), 1.0});
        r2.push_back({L.a_off(), -0.5});
        r2.push_back({L.xi_off() + i, -1.0});
        rb.add_row(r1, -train.labels[i]); // y - yhat - w/2 - xi <= 0
        rb.add_row(r2, train.labels[i]);  // yhat - y - w/2 - xi <= 0
        rb.add_row({{L.xi_off() + i, -1.0}}, 0.0); // xi >= 0
    }
}

Coeffs width_coeffs(const Dataset& train, const ProgramLayout& L, Eigen::Index i,
                    double scale)
{
    Coeffs r;
    for (Eigen::Index j = 0; j < L.d; ++j)
        r.push_back({L.v_off() + j, scale * train.features(i, j)});
    r.push_back({L.a_off(), scale});
    return r;
}

} // namespace

AssembledProgram assemble_budget_program(const Dataset& train, const TrainConfig& config)
{
    config.validate();
    const Eigen::Index m = train.rows(), d = train.cols();
    ProgramLayout L{d, m, config.merged_constraint};

    ConvexProgram p;
    p.n = L.num_vars();
    p.c = Eigen::VectorXd::Zero(p.n);
    p.c.segment(L.xi_off(), m).setConstant(1.0 / static_cast<double>(m));
    p.Q = reg_matrix(L, config.lambda_w, config.lambda_v);

    RowBuilder rb(p.n);
    add_slack_rows(rb, train, L);

    if (!config.merged_constraint) {
        // width_i >= 0 per example, plus the mean-width budget row
        for (Eigen::Index i = 0; i < m; ++i)
            rb.add_row(width_coeffs(train, L, i, -1.0), 0.0);
        Coeffs budget;
        for (Eigen::Index j = 0; j < d; ++j)
            budget.push_back({L.v_off() + j,
                              train.features.col(j).mean()});
        budget.push_back({L.a_off(), 1.0});
        rb.add_row(budget, config.budget);
    } else {
        // single hinge constraint: t_i >= width_i, t_i >= 0, mean t <= B
        for (Eigen::Index i = 0; i < m; ++i) {
            Coeffs r = width_coeffs(train, L, i, 1.0);
            r.push_back({L.t_off() + i, -1.0});
            rb.add_row(r, 0.0);
            rb.add_row({{L.t_off() + i, -1.0}}, 0.0);
        }
        Coeffs budget;
        double inv_m = 1.0 / static_cast<double>(m);
        for (Eigen::Index i = 0; i < m; ++i)
            budget.push_back({L.t_off() + i, inv_m});
        rb.add_row(budget, config.budget);
    }

    p.G = rb.matrix();
    p.h = rb.rhs();
    return AssembledProgram{std::move(p), L};
}

AssembledProgram assemble_fixed_error_program(const Dataset& train,
                                              double alpha_surrogate,
                                              const TrainConfig& config)
{
    config.validate();
    if (alpha_surrogate < 0.0)
        throw std::invalid_argument("train_fixed_error: alpha_surrogate must be nonnegative");
    const Eigen::Index m = train.rows(), d = train.cols();
    ProgramLayout L{d, m, false};

    ConvexProgram p;
    p.n = L.num_vars();
    // objective: mean predicted width = <v, mean(x)> + a
    p.c = Eigen::VectorXd::Zero(p.n);
    for (Eigen::Index j = 0; j < d; ++j)
        p.c[L.v_off() + j] = train.features.col(j).mean();
    p.c[L.a_off()] = 1.0;
    p.Q = reg_matrix(L, config.lambda_w, config.lambda_v);

    RowBuilder rb(p.n);
    add_slack_rows(rb, train, L);
    for (Eigen::Index i = 0; i < m; ++i)
        rb.add_row(width_coeffs(train, L, i, -1.0), 0.0); // width_i >= 0
    Coeffs loss_row;
    double inv_m = 1.0 / static_cast<double>(m);
    for (Eigen::Index i = 0; i < m; ++i)
        loss_row.push_back({L.xi_off() + i, inv_m});
    rb.add_row(loss_row, alpha_surrogate); // mean surrogate loss <= alpha

    p.G = rb.matrix();
    p.h = rb.rhs();
    return AssembledProgram{std::move(p), L};
}

std::pair<CenterSizeModel, SolveStats> solve(const AssembledProgram& assembled,
                                             const TrainConfig& config)
{
    QpResult res = solve_qp(assembled.program, config.tol_opt, config.tol_feas,
                            config.max_iters);
    const ProgramLayout& L = assembled.layout;
    CenterSizeModel model(res.x.segment(L.w_off(), L.d), res.x[L.b_off()],
                          res.x.segment(L.v_off(), L.d), res.x[L.a_off()]);
    return {std::move(model), std::move(res.stats)};
}

namespace {

void attach_train_stats(SolveStats& stats, const CenterSizeModel& model,
                        const Dataset& train)
{
    std::vector<Interval> ivs;
    ivs.reserve(static_cast<std::size_t>(train.rows()));
    double wsum = 0.0;
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
        Interval iv = model.predict(train.features.row(i));
        wsum += iv.width();
        ivs.push_back(iv);
    }
    stats.train_error = empirical_interval_error(train.labels, ivs);
    stats.train_mean_width = wsum / static_cast<double>(train.rows());
}

} // namespace

std::pair<CenterSizeModel, SolveStats> train_budget(const Dataset& train,
                                                    const TrainConfig& config)
{
    auto assembled = assemble_budget_program(train, config);
    auto [model, stats] = solve(assembled, config);
    attach_train_stats(stats, model, train);
    return {std::move(model), std::move(stats)};
}

std::pair<CenterSizeModel, SolveStats> train_fixed_error(const Dataset& train,
                                                         double alpha_surrogate,
                                                         const TrainConfig& config)
{
    auto assembled = assemble_fixed_error_program(train, alpha_surrogate, config);
    auto [model, stats] = solve(assembled, config);
    attach_train_stats(stats, model, train);
    return {std::move(model), std::move(stats)};
}

} // namespace intervalforge
