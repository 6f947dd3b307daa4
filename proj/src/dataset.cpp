#include "intervalforge/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace intervalforge {

Dataset::Dataset(Eigen::MatrixXd X, Eigen::VectorXd y, std::vector<std::string> names)
    : features(std::move(X)), labels(std::move(y)), feature_names(std::move(names))
{
    if (features.rows() != labels.size())
        throw std::invalid_argument("Dataset: row count does not match label count");
    if (features.rows() < 1 || features.cols() < 1)
        throw std::invalid_argument("Dataset: need m >= 1 and d >= 1");
    if (!features.allFinite() || !labels.allFinite())
        throw std::invalid_argument("Dataset: non-finite entries");
    if (!feature_names.empty() &&
        feature_names.size() != static_cast<std::size_t>(features.cols()))
        throw std::invalid_argument("Dataset: feature_names length mismatch");
}

MaxFsInstance::MaxFsInstance(Eigen::MatrixXd A_, Eigen::VectorXd d_)
    : A(std::move(A_)), d_vec(std::move(d_))
{
    if (A.rows() != d_vec.size())
        throw std::invalid_argument("MaxFsInstance: A rows != d length");
    if (A.rows() < 2)
        throw std::invalid_argument("MaxFsInstance: need M >= 2");
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = i + 1; j < A.rows(); ++j)
            if (A.row(i) == A.row(j))
                throw std::invalid_argument("MaxFsInstance: duplicate rows in A");
}

std::string NoiseProfile::to_json() const
{
    nlohmann::json j;
    j["intercept"] = intercept;
    j["slope"] = std::vector<double>(slope.data(), slope.data() + slope.size());
    j["noise"] = (noise == Noise::gaussian) ? "gaussian" : "uniform";
    j["w_star"] = std::vector<double>(w_star.data(), w_star.data() + w_star.size());
    return j.dump();
}

namespace {

std::vector<std::string> split_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ','))
        out.push_back(cur);
    if (!line.empty() && line.back() == ',')
        out.push_back("");
    return out;
}

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

Dataset load_csv(const std::string& path, const std::string& label_column)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_csv: cannot open file '" + path + "'");

    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("load_csv: empty file '" + path + "'");
    std::vector<std::string> header = split_line(line);
    for (auto& h : header) h = trim(h);

    // label column by name, or by 0-based index if the name is not found and
    // the argument parses as an integer
    Eigen::Index label_idx = -1;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == label_column) { label_idx = static_cast<Eigen::Index>(j); break; }
    if (label_idx < 0) {
        try {
            std::size_t pos = 0;
            long v = std::stol(label_column, &pos);
            if (pos == label_column.size() && v >= 0 &&
                v < static_cast<long>(header.size()))
                label_idx = v;
        } catch (...) { /* not an index */ }
    }
    if (label_idx < 0)
        throw std::runtime_error("load_csv: label column '" + label_column +
                                 "' not found in header");
    if (header.size() < 2)
        throw std::runtime_error("load_csv: zero feature columns after removing label");

    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error("load_csv: row " + std::to_string(lineno) +
                                     " has " + std::to_string(cells.size()) +
                                     " cells, expected " + std::to_string(header.size()));
        std::vector<double> vals(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j) {
            std::string c = trim(cells[j]);
            std::size_t pos = 0;
            double v = 0.0;
            bool ok = true;
            try { v = std::stod(c, &pos); } catch (...) { ok = false; }
            if (!ok || pos != c.size() || !std::isfinite(v))
                throw std::runtime_error("load_csv: non-numeric cell '" + c +
                                         "' at row " + std::to_string(lineno) +
                                         ", column '" + header[j] + "'");
            vals[j] = v;
        }
        rows.push_back(std::move(vals));
    }
    if (rows.empty())
        throw std::runtime_error("load_csv: no data rows in '" + path + "'");

    const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index d = static_cast<Eigen::Index>(header.size()) - 1;
    Eigen::MatrixXd X(m, d);
    Eigen::VectorXd y(m);
    std::vector<std::string> names;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (static_cast<Eigen::Index>(j) != label_idx)
            names.push_back(header[j]);
    for (Eigen::Index i = 0; i < m; ++i) {
        Eigen::Index k = 0;
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (static_cast<Eigen::Index>(j) == label_idx)
                y[i] = rows[static_cast<std::size_t>(i)][j];
            else
                X(i, k++) = rows[static_cast<std::size_t>(i)][j];
        }
    }
    return Dataset(std::move(X), std::move(y), std::move(names));
}

void save_csv(const Dataset& data, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_csv: cannot open '" + path + "' for writing");
    char buf[64];
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        if (!data.feature_names.empty())
            out << data.feature_names[static_cast<std::size_t>(j)] << ',';
        else
            out << 'x' << (j + 1) << ',';
    }
    out << "y\n";
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", data.features(i, j));
            out << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.17g", data.labels[i]);
        out << buf << '\n';
    }
}

std::pair<Dataset, ScalingParams> standardize(const Dataset& data)
{
    const Eigen::Index m = data.rows(), d = data.cols();
    if (m < 2)
        throw std::invalid_argument("standardize: need m >= 2");

    ScalingParams sp;
    sp.feature_mean = data.features.colwise().mean();
    sp.feature_sd.resize(d);
    sp.constant_column.assign(static_cast<std::size_t>(d), false);

    Eigen::MatrixXd X = data.features.rowwise() - sp.feature_mean.transpose();
    for (Eigen::Index j = 0; j < d; ++j) {
        double ss = X.col(j).squaredNorm() / static_cast<double>(m - 1);
        double sd = std::sqrt(ss);
        if (sd <= 0.0) {
            sp.constant_column[static_cast<std::size_t>(j)] = true;
            sd = 1.0;
        }
        sp.feature_sd[j] = sd;
        X.col(j) /= sd;
    }

    sp.label_mean = data.labels.mean();
    Eigen::VectorXd y = data.labels.array() - sp.label_mean;
    double lsd = std::sqrt(y.squaredNorm() / static_cast<double>(m - 1));
    if (lsd <= 0.0) {
        sp.label_constant = true;
        lsd = 1.0;
    }
    sp.label_sd = lsd;
    y /= lsd;

    Dataset out(std::move(X), std::move(y), data.feature_names);
    out.metadata_json = data.metadata_json;
    return {std::move(out), std::move(sp)};
}

Dataset unstandardize(const Dataset& data, const ScalingParams& sp)
{
    if (data.cols() != sp.feature_mean.size())
        throw std::invalid_argument("unstandardize: dimension mismatch");
    Eigen::MatrixXd X = data.features;
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        X.col(j) = X.col(j) * sp.feature_sd[j] + Eigen::VectorXd::Constant(X.rows(), sp.feature_mean[j]);
    Eigen::VectorXd y = data.labels * sp.label_sd + Eigen::VectorXd::Constant(data.rows(), sp.label_mean);
    Dataset out(std::move(X), std::move(y), data.feature_names);
    out.metadata_json = data.metadata_json;
    return out;
}

Dataset augment_pairwise(const Dataset& data)
{
    const Eigen::Index m = data.rows(), d = data.cols();
    const Eigen::Index dout = d + d * (d + 1) / 2;
    Eigen::MatrixXd X(m, dout);
    X.leftCols(d) = data.features;
    Eigen::Index k = d;
    std::vector<std::string> names = data.feature_names;
    const bool named = !names.empty();
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i; j < d; ++j) {
            X.col(k) = data.features.col(i).cwiseProduct(data.features.col(j));
            if (named)
                names.push_back(names[static_cast<std::size_t>(i)] + "*" +
                                names[static_cast<std::size_t>(j)]);
            ++k;
        }
    }
    Dataset out(std::move(X), data.labels, std::move(names));
    out.metadata_json = data.metadata_json;
    return out;
}

Dataset subset_rows(const Dataset& data, const std::vector<Eigen::Index>& rows)
{
    if (rows.empty())
        throw std::invalid_argument("subset_rows: empty selection");
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), data.cols());
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        X.row(static_cast<Eigen::Index>(i)) = data.features.row(rows[i]);
        y[static_cast<Eigen::Index>(i)] = data.labels[rows[i]];
    }
    Dataset out(std::move(X), std::move(y), data.feature_names);
    out.metadata_json = data.metadata_json;
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction,
                                  std::uint64_t seed)
{
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("split: fraction must lie in (0,1)");
    const Eigen::Index m = data.rows();
    // rounding rule: train size = floor(fraction*m + 0.5)
    Eigen::Index ntrain = static_cast<Eigen::Index>(
        std::floor(train_fraction * static_cast<double>(m) + 0.5));
    ntrain = std::clamp<Eigen::Index>(ntrain, 1, m - 1);
    if (ntrain < 2)
        throw std::invalid_argument("split: resulting train set has m < 2");

    std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    std::vector<Eigen::Index> tr(idx.begin(), idx.begin() + ntrain);
    std::vector<Eigen::Index> te(idx.begin() + ntrain, idx.end());
    std::sort(tr.begin(), tr.end());
    std::sort(te.begin(), te.end());
    return {subset_rows(data, tr), subset_rows(data, te)};
}

Dataset synth_heteroskedastic(Eigen::Index m, Eigen::Index d,
                              const NoiseProfile& profile, std::uint64_t seed)
{
    if (m < 1 || d < 1)
        throw std::invalid_argument("synth_heteroskedastic: need m >= 1, d >= 1");

    Eigen::VectorXd slope = Eigen::VectorXd::Zero(d);
    for (Eigen::Index j = 0; j < std::min(d, profile.slope.size()); ++j)
        slope[j] = profile.slope[j];
    Eigen::VectorXd wstar = Eigen::VectorXd::Ones(d);
    for (Eigen::Index j = 0; j < std::min(d, profile.w_star.size()); ++j)
        wstar[j] = profile.w_star[j];

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(-std::sqrt(3.0), std::sqrt(3.0));

    Eigen::MatrixXd X(m, d);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            double z = gauss(rng);
            // half-normal on columns feeding the noise scale keeps sigma > 0
            X(i, j) = (slope[j] != 0.0) ? std::abs(z) : z;
        }

    Eigen::VectorXd sigma = (X * slope).array() + profile.intercept;
    if ((sigma.array() <= 0.0).any())
        throw std::invalid_argument(
            "synth_heteroskedastic: noise profile yields sigma(x) <= 0 on sampled x");

    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        double eta = (profile.noise == NoiseProfile::Noise::gaussian)
                         ? gauss(rng) : unif(rng);
        y[i] = wstar.dot(X.row(i)) + sigma[i] * eta;
    }

    Dataset out(std::move(X), std::move(y));
    NoiseProfile recorded = profile;
    recorded.slope = slope;
    recorded.w_star = wstar;
    out.metadata_json = recorded.to_json();
    return out;
}

std::pair<Dataset, double> maxfs_instance(const MaxFsInstance& inst)
{
    const Eigen::Index M = inst.A.rows(), N = inst.A.cols();
    const Eigen::Index m = 2 * M + 1;
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(m, N);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
    X.topRows(M) = inst.A;
    y.head(M) = inst.d_vec;
    return {Dataset(std::move(X), std::move(y)), 0.0};
}

} // namespace intervalforge
