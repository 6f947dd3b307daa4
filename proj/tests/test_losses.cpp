#include <doctest.h>

#include <random>

#include "intervalforge/losses.hpp"

using namespace intervalforge;

TEST_CASE("interval 0/1 loss containment and boundaries")
{
    CHECK(interval_01_loss(2.0, Interval{1.0, 3.0}) == 0.0);
    CHECK(interval_01_loss(3.5, Interval{1.0, 3.0}) == 1.0);
    // closed-interval convention: endpoints count as covered
    CHECK(interval_01_loss(3.0, Interval{1.0, 3.0}) == 0.0);
    CHECK(interval_01_loss(1.0, Interval{1.0, 3.0}) == 0.0);
    CHECK_THROWS_AS(interval_01_loss(0.0, Interval{2.0, 1.0}), std::invalid_argument);
}

TEST_CASE("eps-insensitive loss values")
{
    CHECK(eps_insensitive(3.0, 3.0, 1.0) == 0.0);
    CHECK(eps_insensitive(5.0, 2.0, 1.0) == doctest::Approx(2.0));
    // eps = 0 reduces to the absolute loss
    CHECK(eps_insensitive(4.0, 2.5, 0.0) == doctest::Approx(1.5));
    CHECK_THROWS_AS(eps_insensitive(1.0, 1.0, -0.1), std::invalid_argument);
}

TEST_CASE("pinball loss values")
{
    CHECK(pinball(2.0, 1.0, 0.9) == doctest::Approx(0.9));
    CHECK(pinball(1.0, 2.0, 0.9) == doctest::Approx(0.1));
    CHECK(pinball(7.3, 7.3, 0.42) == 0.0);
    CHECK_THROWS_AS(pinball(1.0, 2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(pinball(1.0, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("pinball at tau=0.5 is half the absolute loss")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 200; ++i) {
        double y = u(rng), yh = u(rng);
        CHECK(pinball(y, yh, 0.5) == doctest::Approx(0.5 * std::abs(y - yh)));
    }
}

TEST_CASE("empirical interval error")
{
    Eigen::VectorXd y(4);
    y << 0.0, 1.0, 2.0, 3.0;
    std::vector<Interval> all_in{{-1, 4}, {-1, 4}, {-1, 4}, {-1, 4}};
    CHECK(empirical_interval_error(y, all_in) == 0.0);
    std::vector<Interval> none{{5, 6}, {5, 6}, {5, 6}, {5, 6}};
    CHECK(empirical_interval_error(y, none) == 1.0);
    std::vector<Interval> three{{-1, 4}, {-1, 4}, {-1, 4}, {5, 6}};
    CHECK(empirical_interval_error(y, three) == doctest::Approx(0.25));
    std::vector<Interval> wrong_len{{-1, 4}};
    CHECK_THROWS_AS(empirical_interval_error(y, wrong_len), std::invalid_argument);
}

TEST_CASE("calibration identity between surrogate and 0/1 loss")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::uniform_real_distribution<double> ue(0.0, 5.0);
    for (int i = 0; i < 5000; ++i) {
        double y = u(rng), yh = u(rng), eps = ue(rng);
        bool surrogate_zero = eps_insensitive(y, yh, eps) == 0.0;
        bool covered = interval_01_loss(y, Interval{yh - eps, yh + eps}) == 0.0;
        CHECK(surrogate_zero == covered);
    }
}

TEST_CASE("eps-insensitive loss is convex and symmetric")
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::uniform_real_distribution<double> ue(0.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
        double y = u(rng), a = u(rng), b = u(rng), eps = ue(rng);
        // midpoint convexity
        double mid = eps_insensitive(y, (a + b) / 2.0, eps);
        double avg = 0.5 * (eps_insensitive(y, a, eps) + eps_insensitive(y, b, eps));
        CHECK(mid <= avg + 1e-12);
        // symmetry: over- vs under-estimation of equal magnitude
        double delta = std::abs(a);
        CHECK(eps_insensitive(y, y + delta, eps) ==
              doctest::Approx(eps_insensitive(y, y - delta, eps)));
    }
}

TEST_CASE("complement identity of the interval loss")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int i = 0; i < 1000; ++i) {
        double y = u(rng), lo = u(rng), hi = lo + std::abs(u(rng));
        double indicator = (lo <= y ? 1.0 : 0.0) * (hi >= y ? 1.0 : 0.0);
        CHECK(interval_01_loss(y, Interval{lo, hi}) == 1.0 - indicator);
    }
}
