#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace intervalforge {

/// Immutable (after construction) training/evaluation input: an m x d
/// feature matrix with a length-m label vector.
struct Dataset {
    Eigen::MatrixXd features;             // m x d, finite
    Eigen::VectorXd labels;               // length m, finite
    std::vector<std::string> feature_names; // optional, length d when present
    std::string metadata_json;            // generator parameters etc., optional

    Dataset() = default;
    Dataset(Eigen::MatrixXd X, Eigen::VectorXd y,
            std::vector<std::string> names = {});

    Eigen::Index rows() const { return features.rows(); }
    Eigen::Index cols() const { return features.cols(); }
};

/// Per-column standardization state; sufficient to invert the transform.
/// Constant columns keep sd = 1 and are flagged, so they map to all-zeros
/// and dimensions stay stable across folds.
struct ScalingParams {
    Eigen::VectorXd feature_mean;
    Eigen::VectorXd feature_sd;           // strictly positive
    std::vector<bool> constant_column;
    double label_mean = 0.0;
    double label_sd = 1.0;
    bool label_constant = false;
};

/// A (possibly infeasible) linear system A z = d, the input of the Max-FS
/// hardness reduction.
struct MaxFsInstance {
    Eigen::MatrixXd A;      // M x N, distinct rows, M >= 2
    Eigen::VectorXd d_vec;  // length M

    MaxFsInstance(Eigen::MatrixXd A_, Eigen::VectorXd d_);
};

/// Parameters of the heteroskedastic generator: y = <w*,x> + sigma(x)*eta
/// with sigma(x) = intercept + <slope,x>. Columns with nonzero slope are
/// drawn half-normal so an affine sigma stays positive.
struct NoiseProfile {
    double intercept = 1.0;
    Eigen::VectorXd slope;                 // resized/zero-padded to d
    enum class Noise { gaussian, uniform } noise = Noise::gaussian;
    Eigen::VectorXd w_star;                // optional; defaults to all-ones

    std::string to_json() const;
};

Dataset load_csv(const std::string& path, const std::string& label_column);

std::pair<Dataset, ScalingParams> standardize(const Dataset& data);
Dataset unstandardize(const Dataset& data, const ScalingParams& sp);

Dataset augment_pairwise(const Dataset& data);

std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction,
                                  std::uint64_t seed);

Dataset synth_heteroskedastic(Eigen::Index m, Eigen::Index d,
                              const NoiseProfile& profile, std::uint64_t seed);

/// Theorem-3 reduction: m = 2M+1 rows, the M system rows plus M+1 all-zero
/// examples, with budget B = 0.
std::pair<Dataset, double> maxfs_instance(const MaxFsInstance& inst);

Dataset subset_rows(const Dataset& data, const std::vector<Eigen::Index>& rows);

void save_csv(const Dataset& data, const std::string& path);

} // namespace intervalforge
