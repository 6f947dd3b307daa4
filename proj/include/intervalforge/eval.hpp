#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "intervalforge/baselines.hpp"
#include "intervalforge/curvefit.hpp"
#include "intervalforge/dataset.hpp"
#include "intervalforge/predictor.hpp"
#include "intervalforge/solver.hpp"

namespace intervalforge {

struct EvalReport {
    double test_error = 0.0;            // mean interval 0/1 loss
    double mean_width = 0.0;            // after repair
    std::vector<std::pair<double, bool>> per_example; // (width, covered)
    std::string method;
};

EvalReport evaluate(const IntervalPredictor& model, const Dataset& test,
                    const std::string& method = "");

/// One grid point of a method configuration.  Fixed-budget methods
/// (intpred, svr, absreg, linreg) read `budget`; fixed-error methods
/// (quantreg, absconf, sqrconf, gaussian) read `alpha`.
struct MethodSpec {
    std::string method = "intpred";
    double budget = std::numeric_limits<double>::quiet_NaN();
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double lambda_w = 1e-4;
    double lambda_v = 1e-4;
    bool merged_constraint = false;

    bool fixed_budget() const;
};

struct FitResult {
    std::unique_ptr<IntervalPredictor> model;
    bool converged = true;
    SolveStats stats; // meaningful for intpred only
};

FitResult fit_method(const Dataset& train, const MethodSpec& spec, std::uint64_t seed);

/// k-fold CV over a config grid; minimizes mean validation interval error,
/// ties broken by smaller mean width, then by grid order.
MethodSpec cross_validate(const Dataset& train, const std::vector<MethodSpec>& grid,
                          int folds, std::uint64_t seed);

struct CurvePoint {
    double budget = 0.0;
    double error = 0.0;
    double stderr_ = 0.0;   // across repetitions; 0 when repetitions = 1
    double mean_width = 0.0;
    int excluded = 0;       // non-converged fits dropped from the aggregate
};

struct SweepOptions {
    int folds = 5;
    double train_fraction = 0.8;
    std::vector<double> lambda_grid; // empty: no CV, lambda fixed from spec
};

std::vector<CurvePoint> budget_sweep(const Dataset& data, const MethodSpec& base_spec,
                                     const std::vector<double>& budgets,
                                     int repetitions, std::uint64_t seed,
                                     const SweepOptions& opts = {});

struct LineSearchResult {
    double budget = 0.0;
    double achieved_error = 0.0;
    CenterSizeModel model;
};

/// Bisection over B against validation error, exploiting error
/// monotonicity in the budget.  Stops when the bracket is narrower than
/// 1e-3 of the upper bracket; throws if the target is unreachable at B_max.
LineSearchResult alpha_line_search(const Dataset& train, const Dataset& val,
                                   double target_error, const TrainConfig& config,
                                   double tol);

struct ComparisonCell {
    double error = std::numeric_limits<double>::quiet_NaN();
    double stderr_ = 0.0;
    double mean_width = std::numeric_limits<double>::quiet_NaN();
    int excluded = 0;
    bool unreliable = false;   // > 20% of fits excluded
    bool unreachable = false;  // interpolation query outside observed widths
};

struct ComparisonTable {
    std::vector<std::string> methods;
    std::vector<double> budgets;
    std::vector<std::vector<ComparisonCell>> cells;  // [method][budget]
    std::vector<double> normalized_budgets;          // empty unless requested

    const ComparisonCell& at(const std::string& method, std::size_t bi) const;
    /// plot-ready CSV: method,budget,error,stderr,mean_width
    std::string to_csv() const;
    /// error ratios intpred/method per budget: method,budget,ratio
    std::string ratios_csv() const;
    std::string to_text() const;
};

struct CompareOptions {
    std::vector<double> alphas;      // fixed-error grid; default 0.01..0.30 step 0.01
    std::vector<double> lambda_grid; // CV grid; empty: fixed lambda
    int folds = 5;
    double train_fraction = 0.8;
    double lambda = 1e-4;
    bool normalize_budgets = false;
    bool merged_constraint = false;
};

ComparisonTable compare_methods(const Dataset& data,
                                const std::vector<std::string>& methods,
                                const std::vector<double>& budgets,
                                int repetitions, std::uint64_t seed,
                                const CompareOptions& opts = {});

} // namespace intervalforge
