#pragma once

#include <Eigen/Core>
#include <vector>

#include "intervalforge/dataset.hpp"
#include "intervalforge/predictor.hpp"
#include "intervalforge/solver.hpp"

namespace intervalforge {

/// Explicit binary hypothesis class over a finite domain:
/// table(h, i) in {0,1} is the label hypothesis h assigns to point i.
struct FiniteBinaryClass {
    Eigen::MatrixXi table; // hypotheses x points

    Eigen::Index num_hypotheses() const { return table.rows(); }
    Eigen::Index num_points() const { return table.cols(); }
};

/// Real-valued base class tabulated over a finite sample:
/// values(b, i) = b(x_i).
struct FiniteRealClass {
    Eigen::MatrixXd values; // functions x points
};

struct OracleSolution {
    BoundaryModel model;          // d = 1
    double error = 1.0;           // empirical interval 0/1 error, in {0,1/m,...,1}
    double mean_width = 0.0;
};

/// Exact budgeted 0/1-interval ERM in one dimension.
///
/// Candidate boundary lines run through every pair of training points, plus
/// horizontal lines through each point; each candidate is also offset by
/// +-eta (eta = 1e-9 label units) to resolve exact-touch ties under the
/// closed-interval convention.  Lower and upper boundaries are chosen
/// independently; pairs violating the per-point ordering or the mean-width
/// budget are discarded.  Any optimal error value is achieved (up to eta) by
/// boundaries touching data points, which makes the enumeration exact.
/// Guards: d = 1 and m <= 14 (the search is O(m^4) candidate pairs).
OracleSolution brute_force_erm_1d(const Dataset& train, double budget);

/// Independent reference objective for the budgeted surrogate program:
/// dense multi-resolution grid refinement over (w, b, v, a) with slacks at
/// their exact tight values, followed by a Nelder-Mead polish.  Guard:
/// total variable count <= 12 (i.e. d = 1, m <= 8).
double reference_solve(const AssembledProgram& assembled);

/// Largest shattered subset size, by exhaustive subset + assignment
/// enumeration.  Guards: <= 12 points, <= 4096 hypotheses.
int vc_dimension(const FiniteBinaryClass& cls);

struct VcEqualityResult {
    int vc_h = 0;
    int vc_loss = 0;
    bool equal = false;
};

/// VC of the class itself vs. VC of its binary 0/1-loss composition over
/// (example, label) pairs with labels in {0,1}.  Guards: <= 6 points (the
/// loss domain doubles), <= 4096 hypotheses.
VcEqualityResult loss_class_vc_equality(const FiniteBinaryClass& cls);

struct GrowthBoundResult {
    long long lhs = 0;   // distinct interval-loss assignment vectors
    long long rhs = 0;   // product of threshold-class assignment counts
    bool holds = false;
};

/// Product bound from the growth-function argument: the interval 0/1-loss
/// assignments realized by ordered boundary pairs, against the product of
/// H_<= and H_>= assignment counts with thresholds at the sample labels.
/// Guards: sample size <= 10.
GrowthBoundResult growth_product_bound_check(const FiniteRealClass& base,
                                             const Eigen::VectorXd& sample_labels);

} // namespace intervalforge
