#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "intervalforge/curvefit.hpp"

using namespace intervalforge;

namespace {

// Concave, nondecreasing cubic on [0, 1]; representable in the spline basis.
double model_curve(double t) { return 0.2 + 0.9 * t - 0.4 * t * t; }

} // namespace

TEST_CASE("representable monotone-concave curve is reproduced")
{
    std::vector<double> widths, accs;
    for (int i = 0; i <= 40; ++i) {
        double t = static_cast<double>(i) / 40.0;
        widths.push_back(t);
        accs.push_back(model_curve(t));
    }
    ShapeSpline s = fit_accuracy_spline(widths, accs);
    for (std::size_t i = 0; i < widths.size(); ++i)
        CHECK(s.accuracy(widths[i]) == doctest::Approx(accs[i]).epsilon(1e-6).scale(1.0));
    CHECK(s.r_squared > 1.0 - 1e-9);
}

TEST_CASE("shape constraints hold on a fine grid even for noisy input")
{
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g(0.0, 0.03);
    std::vector<double> widths, accs;
    for (int i = 0; i <= 60; ++i) {
        double t = static_cast<double>(i) / 60.0 * 3.0;
        widths.push_back(t);
        accs.push_back(1.0 - std::exp(-1.5 * t) + g(rng));
    }
    ShapeSpline s = fit_accuracy_spline(widths, accs);

    const int grid = 1000;
    double prev_val = -std::numeric_limits<double>::infinity();
    double prev_slope = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; ++i) {
        double t = s.x_min + (s.x_max - s.x_min) * static_cast<double>(i) / grid;
        double val = s.accuracy(t);
        double slope = s.accuracy_deriv(t);
        CHECK(val >= prev_val - 1e-9);           // monotone nondecreasing
        CHECK(slope <= prev_slope + 1e-9);       // concave
        CHECK(slope >= -1e-9);
        prev_val = val;
        prev_slope = slope;
    }
    CHECK(s.r_squared > 0.85);
}

TEST_CASE("evaluation clamps outside the observed width range")
{
    std::vector<double> widths, accs;
    for (int i = 0; i <= 20; ++i) {
        double t = 1.0 + static_cast<double>(i) / 20.0;
        widths.push_back(t);
        accs.push_back(model_curve((t - 1.0)));
    }
    ShapeSpline s = fit_accuracy_spline(widths, accs);
    CHECK(s.clamped(0.5));
    CHECK(s.clamped(2.5));
    CHECK(!s.clamped(1.5));
    CHECK(s.accuracy(0.0) == s.accuracy(s.x_min));
    CHECK(s.accuracy(99.0) == s.accuracy(s.x_max));
}

TEST_CASE("too few points or bad input is rejected")
{
    std::vector<double> w{0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<double> a{0.1, 0.2, 0.3, 0.4, 0.5};
    CHECK_THROWS_AS(fit_accuracy_spline(w, a), std::invalid_argument);

    std::vector<double> w2{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    std::vector<double> a2{0.1, 0.2, 0.3, 0.4, 0.5};
    CHECK_THROWS_AS(fit_accuracy_spline(w2, a2), std::invalid_argument);

    std::vector<double> w3{0.1, 0.2, 0.3, 0.4, 0.5, std::nan("")};
    std::vector<double> a3{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    CHECK_THROWS_AS(fit_accuracy_spline(w3, a3), std::invalid_argument);
}

TEST_CASE("interpolate_error_curve averages exact width ties and flags clamps")
{
    std::vector<double> widths{0.1, 0.5, 0.5, 1.0, 1.5, 2.0, 2.5};
    std::vector<double> errors{0.9, 0.6, 0.4, 0.3, 0.2, 0.15, 0.12};
    std::vector<double> query{1.0, 0.01, 5.0};
    InterpolatedCurve c = interpolate_error_curve(widths, errors, query);
    REQUIRE(c.errors.size() == 3);
    CHECK(!c.clamped[0]);
    CHECK(c.clamped[1]);
    CHECK(c.clamped[2]);
    for (double e : c.errors) {
        CHECK(e >= 0.0);
        CHECK(e <= 1.0);
    }
    // ties at width 0.5 averaged before the fit: six distinct widths remain,
    // so the minimum-point guard passes
    CHECK(c.spline.x_min == 0.1);
    CHECK(c.spline.x_max == 2.5);
}

TEST_CASE("interpolated errors are nonincreasing in width")
{
    std::mt19937_64 rng(32);
    std::normal_distribution<double> g(0.0, 0.02);
    std::vector<double> widths, errors, query;
    for (int i = 1; i <= 30; ++i) {
        double t = static_cast<double>(i) / 30.0 * 2.0;
        widths.push_back(t);
        errors.push_back(std::exp(-2.0 * t) + g(rng));
    }
    for (int i = 1; i <= 50; ++i)
        query.push_back(static_cast<double>(i) / 50.0 * 2.0);
    InterpolatedCurve c = interpolate_error_curve(widths, errors, query);
    for (std::size_t i = 1; i < c.errors.size(); ++i)
        CHECK(c.errors[i] <= c.errors[i - 1] + 1e-9);
}
