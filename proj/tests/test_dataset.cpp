#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>

#include "intervalforge/dataset.hpp"

using namespace intervalforge;

namespace {

std::string write_temp(const std::string& body)
{
    static int counter = 0;
    std::string path = "/tmp/iforge_test_" + std::to_string(counter++) + ".csv";
    std::ofstream out(path);
    out << body;
    return path;
}

} // namespace

TEST_CASE("load_csv happy path")
{
    auto path = write_temp("a,b,y\n1,2,3\n4,5,6\n7,8,9\n");
    Dataset d = load_csv(path, "y");
    CHECK(d.rows() == 3);
    CHECK(d.cols() == 2);
    CHECK(d.labels[1] == doctest::Approx(6.0));
    CHECK(d.features(2, 0) == doctest::Approx(7.0));
    CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
    std::remove(path.c_str());
}

TEST_CASE("load_csv error paths")
{
    CHECK_THROWS_WITH_AS(load_csv("/nonexistent/file.csv", "y"),
                         doctest::Contains("cannot open"), std::runtime_error);

    auto bad_cell = write_temp("a,y\n1,2\nabc,4\n");
    CHECK_THROWS_WITH_AS(load_csv(bad_cell, "y"), doctest::Contains("row 3"),
                         std::runtime_error);
    std::remove(bad_cell.c_str());

    auto single = write_temp("y\n1\n2\n");
    CHECK_THROWS_WITH_AS(load_csv(single, "y"), doctest::Contains("zero feature"),
                         std::runtime_error);
    std::remove(single.c_str());

    auto missing = write_temp("a,b\n1,2\n");
    CHECK_THROWS_WITH_AS(load_csv(missing, "y"), doctest::Contains("not found"),
                         std::runtime_error);
    std::remove(missing.c_str());
}

TEST_CASE("csv round trip through save_csv")
{
    Eigen::MatrixXd X(2, 2);
    X << 1.5, -2.25, 3.0, 0.125;
    Eigen::VectorXd y(2);
    y << 0.5, -1.5;
    Dataset d(X, y, {"p", "q"});
    auto path = write_temp("");
    save_csv(d, path);
    Dataset back = load_csv(path, "y");
    CHECK((back.features - d.features).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.labels - d.labels).cwiseAbs().maxCoeff() == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("standardize two-point column and inversion")
{
    Eigen::MatrixXd X(2, 1);
    X << 1.0, 3.0;
    Eigen::VectorXd y(2);
    y << 10.0, 20.0;
    auto [sd, sp] = standardize(Dataset(X, y));
    CHECK(sd.features(0, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)));
    CHECK(sd.features(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(sp.feature_mean[0] == doctest::Approx(2.0));
    CHECK(sp.feature_sd[0] == doctest::Approx(std::sqrt(2.0)));

    Dataset back = unstandardize(sd, sp);
    CHECK((back.features - X).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((back.labels - y).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("standardize constant column maps to zeros and is flagged")
{
    Eigen::MatrixXd X(3, 2);
    X << 5.0, 1.0, 5.0, 2.0, 5.0, 3.0;
    Eigen::VectorXd y(3);
    y << 1.0, 2.0, 3.0;
    auto [sd, sp] = standardize(Dataset(X, y));
    CHECK(sd.features.col(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(sp.constant_column[0]);
    CHECK_FALSE(sp.constant_column[1]);

    Eigen::MatrixXd X1(1, 1);
    X1 << 1.0;
    Eigen::VectorXd y1(1);
    y1 << 1.0;
    CHECK_THROWS_AS(standardize(Dataset(X1, y1)), std::invalid_argument);
}

TEST_CASE("augment_pairwise dimensions and values")
{
    Eigen::MatrixXd X(1, 2);
    X << 2.0, 3.0;
    Eigen::VectorXd y(1);
    y << 0.0;
    Dataset out = augment_pairwise(Dataset(X, y));
    CHECK(out.cols() == 5); // 2 + 3
    CHECK(out.features(0, 2) == doctest::Approx(4.0));
    CHECK(out.features(0, 3) == doctest::Approx(6.0));
    CHECK(out.features(0, 4) == doctest::Approx(9.0));

    for (int d = 1; d <= 30; ++d) {
        Dataset in(Eigen::MatrixXd::Random(2, d), Eigen::VectorXd::Zero(2));
        CHECK(augment_pairwise(in).cols() == d + d * (d + 1) / 2);
    }

    // d = 1 includes the self-product
    Eigen::MatrixXd X1(1, 1);
    X1 << 3.0;
    Dataset out1 = augment_pairwise(Dataset(X1, Eigen::VectorXd::Zero(1)));
    CHECK(out1.cols() == 2);
    CHECK(out1.features(0, 1) == doctest::Approx(9.0));
}

TEST_CASE("split determinism, partition, and rounding")
{
    Dataset d(Eigen::MatrixXd::Random(10, 3), Eigen::VectorXd::Random(10));
    auto [tr1, te1] = split(d, 0.8, 0);
    auto [tr2, te2] = split(d, 0.8, 0);
    CHECK(tr1.rows() == 8);
    CHECK(te1.rows() == 2);
    CHECK((tr1.features - tr2.features).cwiseAbs().maxCoeff() == 0.0);

    // partition: every label value accounted for exactly once
    std::multiset<double> all, parts;
    for (Eigen::Index i = 0; i < d.rows(); ++i) all.insert(d.labels[i]);
    for (Eigen::Index i = 0; i < tr1.rows(); ++i) parts.insert(tr1.labels[i]);
    for (Eigen::Index i = 0; i < te1.rows(); ++i) parts.insert(te1.labels[i]);
    CHECK(all == parts);

    // rounding rule: floor(0.5*5 + 0.5) = 3
    Dataset d5(Eigen::MatrixXd::Random(5, 2), Eigen::VectorXd::Random(5));
    auto [tr5, te5] = split(d5, 0.5, 1);
    CHECK(tr5.rows() == 3);
    CHECK(te5.rows() == 2);

    CHECK_THROWS_AS(split(d, 1.5, 0), std::invalid_argument);

    // different seeds give different partitions on a large set
    Dataset big(Eigen::MatrixXd::Random(1000, 2), Eigen::VectorXd::Random(1000));
    auto [btr1, bte1] = split(big, 0.8, 1);
    auto [btr2, bte2] = split(big, 0.8, 2);
    CHECK((btr1.labels - btr2.labels).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("synth_heteroskedastic determinism and residual spread")
{
    NoiseProfile prof;
    prof.intercept = 0.1;
    prof.slope = Eigen::VectorXd::Zero(3);
    prof.slope[0] = 1.0;
    Dataset a = synth_heteroskedastic(2000, 3, prof, 42);
    Dataset b = synth_heteroskedastic(2000, 3, prof, 42);
    CHECK((a.features - b.features).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.labels - b.labels).cwiseAbs().maxCoeff() == 0.0);
    CHECK(!a.metadata_json.empty());

    // rank correlation of |residual| vs x1 (x1 >= 0 by construction here)
    Eigen::VectorXd resid = a.labels - a.features.rowwise().sum();
    auto rank = [](const Eigen::VectorXd& v) {
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(v.size()));
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(),
                  [&](Eigen::Index p, Eigen::Index q) { return v[p] < v[q]; });
        Eigen::VectorXd r(v.size());
        for (Eigen::Index i = 0; i < v.size(); ++i)
            r[idx[static_cast<std::size_t>(i)]] = static_cast<double>(i);
        return r;
    };
    Eigen::VectorXd r1 = rank(resid.cwiseAbs()), r2 = rank(a.features.col(0));
    double c1 = (r1.array() - r1.mean()).matrix().dot((r2.array() - r2.mean()).matrix());
    double rho = c1 / std::sqrt((r1.array() - r1.mean()).square().sum() *
                                (r2.array() - r2.mean()).square().sum());
    CHECK(rho > 0.5);

    // constant-sigma control has no such trend requirement; just generates
    NoiseProfile flat;
    flat.intercept = 1.0;
    Dataset c = synth_heteroskedastic(50, 2, flat, 1);
    CHECK(c.rows() == 50);

    NoiseProfile bad;
    bad.intercept = -1.0;
    CHECK_THROWS_AS(synth_heteroskedastic(100, 2, bad, 1), std::invalid_argument);
}

TEST_CASE("maxfs_instance construction")
{
    Eigen::MatrixXd A(2, 1);
    A << 1.0, 2.0;
    Eigen::VectorXd dv(2);
    dv << 1.0, 1.0;
    auto [data, budget] = maxfs_instance(MaxFsInstance(A, dv));
    CHECK(budget == 0.0);
    CHECK(data.rows() == 5);
    CHECK(data.features(0, 0) == 1.0);
    CHECK(data.labels[0] == 1.0);
    CHECK(data.features(1, 0) == 2.0);
    // majority of rows are the zero example
    int zeros = 0;
    for (Eigen::Index i = 0; i < data.rows(); ++i)
        if (data.features.row(i).cwiseAbs().maxCoeff() == 0.0 && data.labels[i] == 0.0)
            ++zeros;
    CHECK(zeros == 3);
    CHECK(zeros * 2 > data.rows());

    Eigen::MatrixXd A1(1, 1);
    A1 << 1.0;
    Eigen::VectorXd d1(1);
    d1 << 1.0;
    CHECK_THROWS_AS(MaxFsInstance(A1, d1), std::invalid_argument);

    Eigen::MatrixXd Adup(2, 1);
    Adup << 1.0, 1.0;
    CHECK_THROWS_AS(MaxFsInstance(Adup, dv), std::invalid_argument);
}
