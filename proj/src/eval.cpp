#include "intervalforge/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "intervalforge/losses.hpp"
#include "intervalforge/stats.hpp"

namespace intervalforge {

EvalReport evaluate(const IntervalPredictor& model, const Dataset& test,
                    const std::string& method)
{
    if (model.dim() != test.cols())
        throw std::invalid_argument("evaluate: dimension mismatch");
    EvalReport rep;
    rep.method = method;
    rep.per_example.reserve(static_cast<std::size_t>(test.rows()));
    double werr = 0.0, wsum = 0.0;
    for (Eigen::Index i = 0; i < test.rows(); ++i) {
        Interval iv = model.predict(test.features.row(i));
        bool covered = iv.contains(test.labels[i]);
        rep.per_example.emplace_back(iv.width(), covered);
        wsum += iv.width();
        if (!covered) werr += 1.0;
    }
    rep.test_error = werr / static_cast<double>(test.rows());
    rep.mean_width = wsum / static_cast<double>(test.rows());
    return rep;
}

bool MethodSpec::fixed_budget() const
{
    return method == "intpred" || method == "svr" || method == "absreg" ||
           method == "linreg";
}

FitResult fit_method(const Dataset& train, const MethodSpec& spec, std::uint64_t seed)
{
    FitResult out;
    if (spec.method == "intpred") {
        TrainConfig cfg;
        cfg.budget = spec.budget;
        cfg.lambda_w = spec.lambda_w;
        cfg.lambda_v = spec.lambda_v;
        cfg.merged_constraint = spec.merged_constraint;
        auto [model, stats] = train_budget(train, cfg);
        out.converged = stats.converged;
        out.stats = stats;
        out.model = std::make_unique<CenterSizeModel>(std::move(model));
    } else if (spec.method == "svr" || spec.method == "absreg" || spec.method == "linreg") {
        BaselineKind kind = baseline_kind_from_string(spec.method);
        out.model = std::make_unique<CenterSizeModel>(
            train_fixed_width(train, spec.budget, kind, spec.lambda_w));
    } else if (spec.method == "quantreg") {
        out.model = std::make_unique<BoundaryModel>(
            train_quantreg(train, spec.alpha, spec.lambda_w));
    } else if (spec.method == "absconf" || spec.method == "sqrconf") {
        ConformalLoss loss = (spec.method == "absconf") ? ConformalLoss::absolute
                                                        : ConformalLoss::squared;
        out.model = std::make_unique<ConformalModel>(train_split_conformal(
            train, spec.alpha, loss, spec.lambda_w,
            sub_seed(seed, seed_tag::conformal)));
    } else if (spec.method == "gaussian") {
        auto [w, b] = fit_least_squares(train, spec.lambda_w);
        ConformalModel m;
        m.w = std::move(w);
        m.b = b;
        m.half_width = gaussian_half_width(spec.alpha, train.rows());
        m.calibration_size = static_cast<int>(train.rows());
        out.model = std::make_unique<ConformalModel>(std::move(m));
    } else {
        throw std::invalid_argument(
            "unknown method '" + spec.method +
            "'; valid: intpred svr absreg linreg quantreg absconf sqrconf gaussian");
    }
    return out;
}

MethodSpec cross_validate(const Dataset& train, const std::vector<MethodSpec>& grid,
                          int folds, std::uint64_t seed)
{
    if (folds < 2)
        throw std::invalid_argument("cross_validate: folds must be >= 2");
    if (grid.empty())
        throw std::invalid_argument("cross_validate: empty grid");
    const Eigen::Index m = train.rows();
    if (m / folds < 2)
        throw std::invalid_argument("cross_validate: a fold would have < 2 rows");

    std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    std::size_t best = 0;
    double best_err = std::numeric_limits<double>::infinity();
    double best_width = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double err_sum = 0.0, width_sum = 0.0;
        for (int f = 0; f < folds; ++f) {
            std::vector<Eigen::Index> val_rows, tr_rows;
            for (std::size_t i = 0; i < idx.size(); ++i) {
                if (static_cast<int>(i % static_cast<std::size_t>(folds)) == f)
                    val_rows.push_back(idx[i]);
                else
                    tr_rows.push_back(idx[i]);
            }
            std::sort(val_rows.begin(), val_rows.end());
            std::sort(tr_rows.begin(), tr_rows.end());
            Dataset tr = subset_rows(train, tr_rows);
            Dataset va = subset_rows(train, val_rows);
            FitResult fit = fit_method(tr, grid[g], sub_seed(seed, seed_tag::cv, static_cast<std::uint64_t>(f)));
            EvalReport rep = evaluate(*fit.model, va);
            err_sum += rep.test_error;
            width_sum += rep.mean_width;
        }
        double err = err_sum / folds, width = width_sum / folds;
        if (err < best_err - 1e-15 ||
            (std::abs(err - best_err) <= 1e-15 && width < best_width - 1e-15)) {
            best = g;
            best_err = err;
            best_width = width;
        }
    }
    return grid[best];
}

namespace {

std::vector<MethodSpec> lambda_grid_specs(const MethodSpec& base,
                                          const std::vector<double>& lambdas)
{
    std::vector<MethodSpec> grid;
    for (double l : lambdas) {
        MethodSpec s = base;
        s.lambda_w = l;
        s.lambda_v = l;
        grid.push_back(s);
    }
    return grid;
}

struct Agg {
    std::vector<double> errors;
    std::vector<double> widths;
    int excluded = 0;

    double mean_error() const
    {
        return std::accumulate(errors.begin(), errors.end(), 0.0) /
               static_cast<double>(errors.size());
    }
    double mean_width() const
    {
        return std::accumulate(widths.begin(), widths.end(), 0.0) /
               static_cast<double>(widths.size());
    }
    double stderr_() const
    {
        const auto n = errors.size();
        if (n < 2) return 0.0;
        double mu = mean_error(), ss = 0.0;
        for (double e : errors) ss += (e - mu) * (e - mu);
        return std::sqrt(ss / static_cast<double>(n - 1)) /
               std::sqrt(static_cast<double>(n));
    }
};

} // namespace

std::vector<CurvePoint> budget_sweep(const Dataset& data, const MethodSpec& base_spec,
                                     const std::vector<double>& budgets,
                                     int repetitions, std::uint64_t seed,
                                     const SweepOptions& opts)
{
    if (repetitions < 1)
        throw std::invalid_argument("budget_sweep: repetitions must be >= 1");
    for (std::size_t i = 1; i < budgets.size(); ++i)
        if (!(budgets[i] > budgets[i - 1]))
            throw std::invalid_argument("budget_sweep: budgets must be strictly increasing");

    std::vector<Agg> agg(budgets.size());
    for (int rep = 0; rep < repetitions; ++rep) {
        auto [train, test] = split(data, opts.train_fraction,
                                   sub_seed(seed, seed_tag::sweep, static_cast<std::uint64_t>(rep)));
        for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
            MethodSpec spec = base_spec;
            spec.budget = budgets[bi];
            if (opts.lambda_grid.size() > 1)
                spec = cross_validate(train, lambda_grid_specs(spec, opts.lambda_grid),
                                      opts.folds, sub_seed(seed, seed_tag::cv, static_cast<std::uint64_t>(rep)));
            else if (opts.lambda_grid.size() == 1) {
                spec.lambda_w = opts.lambda_grid[0];
                spec.lambda_v = opts.lambda_grid[0];
            }
            FitResult fit = fit_method(train, spec, sub_seed(seed, seed_tag::sweep, static_cast<std::uint64_t>(rep) * 1000 + bi));
            if (!fit.converged) {
                agg[bi].excluded++;
                continue;
            }
            EvalReport rep_out = evaluate(*fit.model, test);
            agg[bi].errors.push_back(rep_out.test_error);
            agg[bi].widths.push_back(rep_out.mean_width);
        }
    }

    std::vector<CurvePoint> curve;
    for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
        CurvePoint p;
        p.budget = budgets[bi];
        p.excluded = agg[bi].excluded;
        if (!agg[bi].errors.empty()) {
            p.error = agg[bi].mean_error();
            p.stderr_ = agg[bi].stderr_();
            p.mean_width = agg[bi].mean_width();
        } else {
            p.error = std::numeric_limits<double>::quiet_NaN();
        }
        curve.push_back(p);
    }
    return curve;
}

LineSearchResult alpha_line_search(const Dataset& train, const Dataset& val,
                                   double target_error, const TrainConfig& config,
                                   double tol)
{
    if (!(target_error > 0.0 && target_error <= 1.0))
        throw std::invalid_argument("alpha_line_search: target_error must lie in (0,1]");
    if (!(tol > 0.0))
        throw std::invalid_argument("alpha_line_search: tol must be positive");

    auto val_error = [&](double B) {
        TrainConfig cfg = config;
        cfg.budget = B;
        auto [model, stats] = train_budget(train, cfg);
        EvalReport rep = evaluate(model, val);
        return std::make_pair(rep.test_error, std::move(model));
    };

    auto [err0, model0] = val_error(0.0);
    if (err0 <= target_error + tol)
        return LineSearchResult{0.0, err0, std::move(model0)};

    const double B_max =
        4.0 * (train.labels.maxCoeff() - train.labels.minCoeff() + 1.0);
    auto [err_hi, model_hi] = val_error(B_max);
    if (err_hi > target_error + tol)
        throw std::runtime_error(
            "alpha_line_search: target unreachable at B_max; best achieved error " +
            std::to_string(err_hi));

    double lo = 0.0, hi = B_max;
    double hi_err = err_hi;
    CenterSizeModel hi_model = std::move(model_hi);
    const double stop_width = 1e-3 * B_max; // documented stopping width
    while (hi - lo > stop_width) {
        double mid = (lo + hi) / 2.0;
        auto [err_mid, model_mid] = val_error(mid);
        if (err_mid <= target_error + tol) {
            hi = mid;
            hi_err = err_mid;
            hi_model = std::move(model_mid);
        } else {
            lo = mid;
        }
    }
    return LineSearchResult{hi, hi_err, std::move(hi_model)};
}

const ComparisonCell& ComparisonTable::at(const std::string& method, std::size_t bi) const
{
    for (std::size_t mi = 0; mi < methods.size(); ++mi)
        if (methods[mi] == method) return cells[mi][bi];
    throw std::out_of_range("ComparisonTable: no method '" + method + "'");
}

namespace {
std::string fmt_num(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}
} // namespace

std::string ComparisonTable::to_csv() const
{
    std::ostringstream os;
    os << "method,budget,error,stderr,mean_width\n";
    for (std::size_t mi = 0; mi < methods.size(); ++mi)
        for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
            const auto& c = cells[mi][bi];
            os << methods[mi] << ',' << fmt_num(budgets[bi]) << ',' << fmt_num(c.error)
               << ',' << fmt_num(c.stderr_) << ',' << fmt_num(c.mean_width) << '\n';
        }
    return os.str();
}

std::string ComparisonTable::ratios_csv() const
{
    std::ostringstream os;
    os << "method,budget,intpred_error_ratio\n";
    std::ptrdiff_t ip = -1;
    for (std::size_t mi = 0; mi < methods.size(); ++mi)
        if (methods[mi] == "intpred") ip = static_cast<std::ptrdiff_t>(mi);
    if (ip < 0) return os.str();
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        if (static_cast<std::ptrdiff_t>(mi) == ip) continue;
        for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
            double ratio = cells[static_cast<std::size_t>(ip)][bi].error / cells[mi][bi].error;
            os << methods[mi] << ',' << fmt_num(budgets[bi]) << ',' << fmt_num(ratio) << '\n';
        }
    }
    return os.str();
}

std::string ComparisonTable::to_text() const
{
    std::ostringstream os;
    os << "method      ";
    for (double b : budgets) {
        char buf[32];
        std::snprintf(buf, sizeof buf, " B=%-10.4g", b);
        os << buf;
    }
    os << '\n';
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        char name[32];
        std::snprintf(name, sizeof name, "%-12s", methods[mi].c_str());
        os << name;
        for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
            const auto& c = cells[mi][bi];
            char buf[40];
            if (std::isnan(c.error))
                std::snprintf(buf, sizeof buf, " %-12s", "unconverged");
            else if (c.unreachable)
                std::snprintf(buf, sizeof buf, " %.4f(clmp)", c.error);
            else
                std::snprintf(buf, sizeof buf, " %.4f      ", c.error);
            os << buf;
            if (c.unreliable) os << '!';
        }
        os << '\n';
    }
    return os.str();
}

ComparisonTable compare_methods(const Dataset& data,
                                const std::vector<std::string>& methods,
                                const std::vector<double>& budgets,
                                int repetitions, std::uint64_t seed,
                                const CompareOptions& opts)
{
    if (methods.empty() || budgets.empty())
        throw std::invalid_argument("compare_methods: empty method or budget list");
    if (repetitions < 1)
        throw std::invalid_argument("compare_methods: repetitions must be >= 1");

    std::vector<double> alphas = opts.alphas;
    if (alphas.empty())
        for (int i = 1; i <= 30; ++i) alphas.push_back(0.01 * i);

    ComparisonTable table;
    table.methods = methods;
    table.budgets = budgets;
    table.cells.assign(methods.size(),
                       std::vector<ComparisonCell>(budgets.size()));

    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const std::string& method = methods[mi];
        MethodSpec probe;
        probe.method = method; // validates the name through fit paths below
        probe.lambda_w = opts.lambda;
        probe.lambda_v = opts.lambda;
        probe.merged_constraint = opts.merged_constraint;

        if (probe.fixed_budget()) {
            std::vector<Agg> agg(budgets.size());
            for (int rep = 0; rep < repetitions; ++rep) {
                auto [train, test] =
                    split(data, opts.train_fraction,
                          sub_seed(seed, seed_tag::sweep, static_cast<std::uint64_t>(rep)));
                for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
                    MethodSpec spec = probe;
                    spec.budget = budgets[bi];
                    if (opts.lambda_grid.size() > 1)
                        spec = cross_validate(train, lambda_grid_specs(spec, opts.lambda_grid),
                                              opts.folds,
                                              sub_seed(seed, seed_tag::cv, static_cast<std::uint64_t>(rep)));
                    FitResult fit = fit_method(train, spec,
                                               sub_seed(seed, seed_tag::sweep,
                                                        1000 + static_cast<std::uint64_t>(rep)));
                    if (!fit.converged) {
                        agg[bi].excluded++;
                        continue;
                    }
                    EvalReport r = evaluate(*fit.model, test);
                    agg[bi].errors.push_back(r.test_error);
                    agg[bi].widths.push_back(r.mean_width);
                }
            }
            for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
                auto& c = table.cells[mi][bi];
                c.excluded = agg[bi].excluded;
                if (!agg[bi].errors.empty()) {
                    c.error = agg[bi].mean_error();
                    c.stderr_ = agg[bi].stderr_();
                    c.mean_width = agg[bi].mean_width();
                    c.unreliable =
                        agg[bi].excluded * 5 > repetitions; // > 20% exclusions
                }
            }
        } else {
            // fixed-error method: alpha grid per repetition, then map widths
            // to the query budgets through the shape-constrained fit
            std::vector<std::vector<double>> per_budget_errors(budgets.size());
            std::vector<std::vector<double>> per_budget_widths(budgets.size());
            std::vector<bool> any_clamped(budgets.size(), false);
            int excluded = 0;
            for (int rep = 0; rep < repetitions; ++rep) {
                auto [train, test] =
                    split(data, opts.train_fraction,
                          sub_seed(seed, seed_tag::sweep, static_cast<std::uint64_t>(rep)));
                std::vector<double> ws, errs;
                for (double alpha : alphas) {
                    MethodSpec spec = probe;
                    spec.alpha = alpha;
                    try {
                        FitResult fit = fit_method(train, spec,
                                                   sub_seed(seed, seed_tag::sweep,
                                                            2000 + static_cast<std::uint64_t>(rep)));
                        EvalReport r = evaluate(*fit.model, test);
                        if (r.mean_width > 0.0) {
                            ws.push_back(r.mean_width);
                            errs.push_back(r.test_error);
                        }
                    } catch (const std::exception&) {
                        // e.g. insufficient calibration data at tiny alpha
                    }
                }
                if (ws.size() < 6) {
                    excluded++;
                    continue;
                }
                InterpolatedCurve curve = interpolate_error_curve(ws, errs, budgets);
                for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
                    per_budget_errors[bi].push_back(curve.errors[bi]);
                    if (curve.clamped[bi]) any_clamped[bi] = true;
                    per_budget_widths[bi].push_back(budgets[bi]);
                }
            }
            for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
                auto& c = table.cells[mi][bi];
                c.excluded = excluded;
                if (!per_budget_errors[bi].empty()) {
                    Agg a;
                    a.errors = per_budget_errors[bi];
                    a.widths = per_budget_widths[bi];
                    c.error = a.mean_error();
                    c.stderr_ = a.stderr_();
                    c.mean_width = budgets[bi];
                    c.unreachable = any_clamped[bi];
                    c.unreliable = excluded * 5 > repetitions;
                }
            }
        }
    }

    if (opts.normalize_budgets) {
        // rescale so the budget where intpred reaches error 0.1 maps to 1
        double ref = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            if (methods[mi] != "intpred") continue;
            for (std::size_t bi = 0; bi + 1 < budgets.size(); ++bi) {
                double e0 = table.cells[mi][bi].error, e1 = table.cells[mi][bi + 1].error;
                if ((e0 - 0.1) * (e1 - 0.1) <= 0.0 && e0 != e1) {
                    double t = (e0 - 0.1) / (e0 - e1);
                    ref = budgets[bi] + t * (budgets[bi + 1] - budgets[bi]);
                    break;
                }
            }
        }
        if (std::isfinite(ref) && ref > 0.0)
            for (double b : budgets) table.normalized_budgets.push_back(b / ref);
    }
    return table;
}

} // namespace intervalforge
