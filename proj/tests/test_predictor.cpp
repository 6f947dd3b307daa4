#include <doctest.h>

#include <random>

#include "intervalforge/predictor.hpp"

using namespace intervalforge;

TEST_CASE("predict with constant model")
{
    CenterSizeModel m(Eigen::VectorXd::Zero(2), 1.0, Eigen::VectorXd::Zero(2), 2.0);
    Eigen::VectorXd x(2);
    x << 3.0, -4.0;
    Interval iv = m.predict(x);
    CHECK(iv.lower == doctest::Approx(0.0));
    CHECK(iv.upper == doctest::Approx(2.0));

    Eigen::VectorXd wrong(3);
    CHECK_THROWS_AS(m.predict(wrong), std::invalid_argument);
}

TEST_CASE("negative predicted width collapses to a point interval")
{
    Eigen::VectorXd v(1);
    v << -1.0;
    CenterSizeModel m(Eigen::VectorXd::Ones(1), 0.0, v, 0.5);
    Eigen::VectorXd x(1);
    x << 1.0; // width = -0.5
    Interval iv = m.predict(x);
    CHECK(iv.lower == iv.upper);
    CHECK(iv.lower == doctest::Approx(1.0)); // center preserved
    CHECK(iv.width() == 0.0);
}

TEST_CASE("zero size weights give point intervals everywhere")
{
    CenterSizeModel m(Eigen::VectorXd::Ones(2), 0.5, Eigen::VectorXd::Zero(2), 0.0);
    Eigen::VectorXd x(2);
    x << 1.0, 2.0;
    CHECK(m.predict(x).width() == 0.0);
}

TEST_CASE("parameterization conversion round trip and fixed examples")
{
    Eigen::VectorXd wl(1), wu(1);
    wl << 1.0;
    wu << 3.0;
    BoundaryModel bm(wl, 0.0, wu, 2.0);
    CenterSizeModel cs = boundary_to_center_size(bm);
    CHECK(cs.w[0] == doctest::Approx(2.0));
    CHECK(cs.b == doctest::Approx(1.0));
    CHECK(cs.v[0] == doctest::Approx(2.0));
    CHECK(cs.a == doctest::Approx(2.0));

    BoundaryModel back = center_size_to_boundary(cs);
    CHECK(back.w_l[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(back.c_l == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(back.w_u[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(back.c_u == doctest::Approx(2.0).epsilon(1e-12));

    // coincident boundaries -> point predictor
    BoundaryModel pt(wl, 0.5, wl, 0.5);
    CenterSizeModel pt_cs = boundary_to_center_size(pt);
    CHECK(pt_cs.v[0] == 0.0);
    CHECK(pt_cs.a == 0.0);
}

TEST_CASE("parameterization equivalence on random models")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 2.0);
    for (int t = 0; t < 200; ++t) {
        int d = 1 + static_cast<int>(rng() % 5);
        Eigen::VectorXd w(d), v(d), x(d);
        for (int j = 0; j < d; ++j) { w[j] = g(rng); v[j] = g(rng); }
        CenterSizeModel cs(w, g(rng), v, g(rng));
        BoundaryModel bm = center_size_to_boundary(cs);
        for (int k = 0; k < 20; ++k) {
            for (int j = 0; j < d; ++j) x[j] = g(rng);
            double yh = cs.center(x);
            double dh = cs.width(x);
            if (dh >= 0.0) {
                Interval a = cs.predict(x), b = bm.predict(x);
                CHECK(a.lower == doctest::Approx(b.lower).epsilon(1e-9));
                CHECK(a.upper == doctest::Approx(b.upper).epsilon(1e-9));
            } else {
                // repair: both collapse, center unchanged
                CHECK(cs.predict(x).lower == doctest::Approx(yh));
                CHECK(bm.predict(x).lower == doctest::Approx(yh));
            }
        }
    }
}

TEST_CASE("positive homogeneity of predict")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXd w(2), v(2), x(2);
    w << g(rng), g(rng);
    v << 0.3, 0.1;
    x << g(rng), g(rng);
    CenterSizeModel m(w, 0.7, v, 1.1);
    const double c = 2.5;
    CenterSizeModel scaled(c * w, c * 0.7, c * v, c * 1.1);
    Interval a = m.predict(x), b = scaled.predict(x);
    CHECK(b.lower == doctest::Approx(c * a.lower));
    CHECK(b.upper == doctest::Approx(c * a.upper));
}

TEST_CASE("interval construction guards")
{
    CHECK_THROWS_AS(Interval::make(2.0, 1.0), std::invalid_argument);
    Interval iv = Interval::make(1.0, 2.0);
    CHECK(iv.contains(1.0));
    CHECK(iv.contains(2.0));
    CHECK(!iv.contains(2.5));
}
