#pragma once

#include "intervalforge/dataset.hpp"
#include "intervalforge/predictor.hpp"
#include "intervalforge/qp.hpp"

namespace intervalforge {

/// Training knobs for the budgeted surrogate program and its reversed
/// fixed-error variant.
struct TrainConfig {
    double budget = 1.0;          // B, mean interval size, label units
    double lambda_w = 0.0;        // squared-norm regularization on the center weights
    double lambda_v = 0.0;        // squared-norm regularization on the size weights
    double tol_opt = 1e-8;
    double tol_feas = 1e-8;
    int max_iters = 100;
    // Replace the per-example width nonnegativity rows + budget row by the
    // single hinge constraint (1/m) sum max{0, width_i} <= B. Off by default.
    bool merged_constraint = false;

    void validate() const;
};

/// Variable layout of the assembled programs:
///   [ w (d) | b | v (d) | a | xi (m) | t (m, merged-constraint only) ]
struct ProgramLayout {
    Eigen::Index d = 0;
    Eigen::Index m = 0;
    bool has_hinge_slack = false;
    Eigen::Index w_off() const { return 0; }
    Eigen::Index b_off() const { return d; }
    Eigen::Index v_off() const { return d + 1; }
    Eigen::Index a_off() const { return 2 * d + 1; }
    Eigen::Index xi_off() const { return 2 * d + 2; }
    Eigen::Index t_off() const { return 2 * d + 2 + m; }
    Eigen::Index num_vars() const { return 2 * d + 2 + m + (has_hinge_slack ? m : 0); }
};

struct AssembledProgram {
    ConvexProgram program;
    ProgramLayout layout;
};

/// Budgeted surrogate:  min (1/m) sum xi_i + lambda_w |w|^2 + lambda_v |v|^2
/// with the exact slack encoding of the parametrized eps-insensitive loss.
AssembledProgram assemble_budget_program(const Dataset& train, const TrainConfig& config);

/// Reversed program:  min (1/m) sum width_i  s.t. widths >= 0 and
/// (1/m) sum xi_i <= alpha_surrogate.
AssembledProgram assemble_fixed_error_program(const Dataset& train,
                                              double alpha_surrogate,
                                              const TrainConfig& config);

std::pair<CenterSizeModel, SolveStats> solve(const AssembledProgram& assembled,
                                             const TrainConfig& config);

std::pair<CenterSizeModel, SolveStats> train_budget(const Dataset& train,
                                                    const TrainConfig& config);

std::pair<CenterSizeModel, SolveStats> train_fixed_error(const Dataset& train,
                                                         double alpha_surrogate,
                                                         const TrainConfig& config);

} // namespace intervalforge
