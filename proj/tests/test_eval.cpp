#include <doctest.h>

#include <random>

#include "intervalforge/eval.hpp"

using namespace intervalforge;

namespace {

Dataset noisy_line(Eigen::Index m, double noise_sd, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd X(m, 1);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        X(i, 0) = g(rng);
        y[i] = X(i, 0) + noise_sd * g(rng);
    }
    return Dataset(std::move(X), std::move(y));
}

} // namespace

TEST_CASE("evaluate endpoints of the width/error tradeoff")
{
    Dataset d = noisy_line(50, 1.0, 41);

    // very wide constant predictor: error 0, huge width
    CenterSizeModel wide(Eigen::VectorXd::Zero(1), 0.0, Eigen::VectorXd::Zero(1), 1e6);
    EvalReport rw = evaluate(wide, d, "wide");
    CHECK(rw.test_error == 0.0);
    CHECK(rw.mean_width == doctest::Approx(1e6));
    CHECK(rw.method == "wide");

    // zero-width predictor on continuous labels: error ~ 1
    CenterSizeModel point(Eigen::VectorXd::Zero(1), 0.0, Eigen::VectorXd::Zero(1), 0.0);
    EvalReport rp = evaluate(point, d);
    CHECK(rp.test_error == 1.0);
    CHECK(rp.mean_width == 0.0);

    // error + coverage = 1 on the per-example vector
    int covered = 0;
    for (const auto& [w, cov] : rw.per_example)
        if (cov) ++covered;
    CHECK(static_cast<double>(covered) / static_cast<double>(d.rows()) +
              rw.test_error ==
          doctest::Approx(1.0));

    Dataset mismatched(Eigen::MatrixXd::Random(3, 2), Eigen::VectorXd::Random(3));
    CHECK_THROWS_AS(evaluate(wide, mismatched), std::invalid_argument);
}

TEST_CASE("evaluate is permutation invariant")
{
    Dataset d = noisy_line(30, 0.5, 42);
    std::vector<Eigen::Index> perm(30);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(1);
    std::shuffle(perm.begin(), perm.end(), rng);
    Dataset shuffled = subset_rows(d, perm);

    CenterSizeModel m(Eigen::VectorXd::Ones(1), 0.0, Eigen::VectorXd::Zero(1), 1.0);
    EvalReport a = evaluate(m, d), b = evaluate(m, shuffled);
    CHECK(a.test_error == doctest::Approx(b.test_error));
    CHECK(a.mean_width == doctest::Approx(b.mean_width));
}

TEST_CASE("method specs know which knob they read")
{
    for (const char* name : {"intpred", "svr", "absreg", "linreg"}) {
        MethodSpec s;
        s.method = name;
        CHECK(s.fixed_budget());
    }
    for (const char* name : {"quantreg", "absconf", "sqrconf", "gaussian"}) {
        MethodSpec s;
        s.method = name;
        CHECK(!s.fixed_budget());
    }

    Dataset d = noisy_line(20, 0.5, 43);
    MethodSpec bad;
    bad.method = "forest";
    CHECK_THROWS_WITH_AS(fit_method(d, bad, 0), doctest::Contains("unknown method"),
                         std::invalid_argument);
}

TEST_CASE("fit_method dispatches every method")
{
    Dataset d = noisy_line(60, 0.5, 44);
    for (const char* name :
         {"intpred", "svr", "absreg", "linreg", "quantreg", "absconf", "sqrconf",
          "gaussian"}) {
        MethodSpec s;
        s.method = name;
        s.budget = 1.0;
        s.alpha = 0.2;
        FitResult fit = fit_method(d, s, 7);
        REQUIRE(fit.model != nullptr);
        EvalReport rep = evaluate(*fit.model, d);
        CHECK(rep.test_error >= 0.0);
        CHECK(rep.test_error <= 1.0);
        CHECK(rep.mean_width >= 0.0);
    }
}

TEST_CASE("cross_validate guards and singleton grid")
{
    Dataset d = noisy_line(40, 0.5, 45);
    MethodSpec s;
    s.method = "svr";
    s.budget = 1.0;
    CHECK_THROWS_AS(cross_validate(d, {s}, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(cross_validate(d, {}, 5, 0), std::invalid_argument);

    Dataset tiny = noisy_line(5, 0.5, 46);
    CHECK_THROWS_WITH_AS(cross_validate(tiny, {s}, 4, 0),
                         doctest::Contains("< 2 rows"), std::invalid_argument);

    MethodSpec got = cross_validate(d, {s}, 5, 0);
    CHECK(got.method == "svr");
    CHECK(got.budget == 1.0);
}

TEST_CASE("cross_validate picks the config with lower validation error")
{
    Dataset d = noisy_line(100, 0.5, 47);
    MethodSpec narrow, wide;
    narrow.method = "svr";
    narrow.budget = 0.01; // nearly point intervals: error near 1
    wide = narrow;
    wide.budget = 5.0;    // generous width: error near 0
    MethodSpec got = cross_validate(d, {narrow, wide}, 5, 3);
    CHECK(got.budget == 5.0);

    // identical entries: the first wins (grid order tie-break); the result
    // must equal that entry's config either way
    MethodSpec twin = cross_validate(d, {wide, wide}, 5, 3);
    CHECK(twin.budget == wide.budget);
}

TEST_CASE("budget_sweep determinism and conventions")
{
    Dataset d = noisy_line(120, 0.5, 48);
    MethodSpec s;
    s.method = "intpred";
    s.lambda_w = 1e-4;
    s.lambda_v = 1e-4;
    std::vector<double> budgets{0.25, 1.0, 3.0};

    auto c1 = budget_sweep(d, s, budgets, 2, 9);
    auto c2 = budget_sweep(d, s, budgets, 2, 9);
    REQUIRE(c1.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(c1[i].budget == budgets[i]);
        CHECK(c1[i].error == c2[i].error);
        CHECK(c1[i].stderr_ == c2[i].stderr_);
        CHECK(c1[i].excluded == 0);
    }
    // statistical monotonicity: wide beats narrow well beyond noise here
    CHECK(c1[2].error <= c1[0].error + 2.0 * (c1[0].stderr_ + c1[2].stderr_) + 1e-12);

    auto single = budget_sweep(d, s, {1.0}, 1, 9);
    CHECK(single[0].stderr_ == 0.0);

    CHECK_THROWS_AS(budget_sweep(d, s, {1.0, 0.5}, 1, 9), std::invalid_argument);
    CHECK_THROWS_AS(budget_sweep(d, s, {1.0}, 0, 9), std::invalid_argument);
}

TEST_CASE("alpha_line_search basics")
{
    Dataset train = noisy_line(120, 0.5, 49);
    Dataset val = noisy_line(120, 0.5, 50);
    TrainConfig cfg;

    // vacuous target: zero budget suffices
    LineSearchResult vac = alpha_line_search(train, val, 1.0, cfg, 1e-3);
    CHECK(vac.budget == 0.0);

    LineSearchResult r = alpha_line_search(train, val, 0.2, cfg, 0.01);
    CHECK(r.achieved_error <= 0.2 + 0.01);
    CHECK(r.budget > 0.0);

    CHECK_THROWS_AS(alpha_line_search(train, val, 0.0, cfg, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(alpha_line_search(train, val, 0.2, cfg, 0.0), std::invalid_argument);
}

TEST_CASE("alpha_line_search matches the normal-quantile width on pure noise")
{
    // y ~ N(0,1) independent of x: at error 0.1 the optimal width is the 90%
    // central mass, 2 * 1.645
    std::mt19937_64 rng(51);
    std::normal_distribution<double> g(0.0, 1.0);
    auto make = [&](Eigen::Index m) {
        Eigen::MatrixXd X(m, 1);
        Eigen::VectorXd y(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            X(i, 0) = g(rng);
            y[i] = g(rng);
        }
        return Dataset(std::move(X), std::move(y));
    };
    Dataset train = make(800), val = make(800);
    TrainConfig cfg;
    LineSearchResult r = alpha_line_search(train, val, 0.1, cfg, 0.005);
    CHECK(r.budget == doctest::Approx(2.0 * 1.6449).epsilon(0.15));
}

TEST_CASE("alpha_line_search reports unreachable targets")
{
    Dataset train = noisy_line(60, 0.3, 52);
    // validation set with a far outlier no trained model will cover
    Eigen::MatrixXd Xv(3, 1);
    Xv << 0.1, -0.2, 0.05;
    Eigen::VectorXd yv(3);
    yv << 0.1, -0.2, 1e7;
    Dataset val(std::move(Xv), std::move(yv));
    TrainConfig cfg;
    CHECK_THROWS_WITH_AS(alpha_line_search(train, val, 0.05, cfg, 0.01),
                         doctest::Contains("target unreachable"), std::runtime_error);
}

TEST_CASE("compare_methods table structure and determinism")
{
    Dataset d = noisy_line(150, 0.5, 53);
    std::vector<std::string> methods{"intpred", "svr", "quantreg"};
    std::vector<double> budgets{0.5, 1.5};
    CompareOptions opts;
    opts.alphas = {0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6};

    ComparisonTable t1 = compare_methods(d, methods, budgets, 2, 13, opts);
    ComparisonTable t2 = compare_methods(d, methods, budgets, 2, 13, opts);
    CHECK(t1.to_csv() == t2.to_csv());
    CHECK(t1.to_csv().rfind("method,budget,error,stderr,mean_width", 0) == 0);
    CHECK(!t1.ratios_csv().empty());
    CHECK(!t1.to_text().empty());

    REQUIRE(t1.methods.size() == 3);
    REQUIRE(t1.budgets.size() == 2);
    for (std::size_t mi = 0; mi < t1.methods.size(); ++mi)
        for (std::size_t bi = 0; bi < t1.budgets.size(); ++bi) {
            const ComparisonCell& c = t1.cells[mi][bi];
            // every cell is filled or carries an explicit marker
            CHECK((std::isfinite(c.error) || c.unreachable || c.unreliable));
        }
    CHECK_THROWS_AS(t1.at("forest", 0), std::out_of_range);

    CHECK_THROWS_AS(compare_methods(d, {}, budgets, 1, 0, opts), std::invalid_argument);
    CHECK_THROWS_AS(compare_methods(d, methods, budgets, 0, 0, opts),
                    std::invalid_argument);
}
