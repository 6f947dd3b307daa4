#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <string>
#include <vector>

namespace intervalforge {

/// Standard-form convex program:
///   minimize    c'x + (1/2) x'Q x      (Q symmetric PSD; diagonal for the
///   subject to  G x <= h                training programs, where it carries
///                                       the squared-norm regularization)
/// Assembled by the training front-ends and by the shape-constrained curve
/// fitter; solved by solve_qp below.
struct ConvexProgram {
    Eigen::Index n = 0;
    Eigen::VectorXd c;
    Eigen::SparseMatrix<double> Q;  // n x n
    Eigen::SparseMatrix<double> G;  // M x n, row-compressed on assembly
    Eigen::VectorXd h;              // length M

    Eigen::Index num_constraints() const { return h.size(); }
    double objective(const Eigen::VectorXd& x) const;
    /// Max over rows of (Gx - h)_+, the primal feasibility violation.
    double max_violation(const Eigen::VectorXd& x) const;
    /// Plain-text dump of the standard form, for cross-checking with
    /// external solvers.
    std::string dump() const;
};

struct SolveStats {
    double objective = 0.0;
    double primal_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    // Tolerance semantics: the duality gap is measured relative to
    // max(1, |objective|), i.e. relative when |objective| > 1, absolute
    // otherwise.
    std::string tolerance_semantics =
        "gap <= tol_opt * max(1,|obj|); feasibility <= tol_feas * (1+|h|_inf)";
    // Filled by the training wrappers:
    double train_error = -1.0;
    double train_mean_width = -1.0;
};

struct QpResult {
    Eigen::VectorXd x;
    SolveStats stats;
};

/// Primal-dual interior-point method (Mehrotra predictor-corrector) on the
/// condensed normal equations.  Rows of G denser than half the variable
/// count (the budget / aggregate-slack rows) are split out and handled by a
/// low-rank Woodbury correction so the sparse factorization keeps its arrow
/// structure.  Deterministic: identical inputs give bit-identical iterates.
QpResult solve_qp(const ConvexProgram& p, double tol_opt = 1e-8,
                  double tol_feas = 1e-8, int max_iters = 100);

/// Helper for row-wise assembly of sparse constraint matrices.
class RowBuilder {
public:
    explicit RowBuilder(Eigen::Index n) : n_(n) {}
    void add_row(const std::vector<std::pair<Eigen::Index, double>>& coeffs, double rhs);
    Eigen::SparseMatrix<double> matrix() const;
    Eigen::VectorXd rhs() const;
    Eigen::Index rows() const { return static_cast<Eigen::Index>(rhs_.size()); }

private:
    Eigen::Index n_;
    std::vector<Eigen::Triplet<double>> trips_;
    std::vector<double> rhs_;
};

} // namespace intervalforge
