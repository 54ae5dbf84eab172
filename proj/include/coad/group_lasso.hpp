#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coad/dataset.hpp"
#include "coad/groups.hpp"

namespace coad {

/// Solution of one Group-Lasso problem
///   min_b (1/2)||y - X b||_n^2 + lambda sum_k sqrt(|G_k|) ||b_{G_k}||.
struct GroupFitResult {
    Eigen::VectorXd beta;          // length p (collapsed when fitted via replication)
    double lambda = 0.0;
    std::vector<int> active_groups;  // group indices with positive block norm
    double block_kkt_residual = 0.0;
    int sweeps = 0;
    double objective = 0.0;
    bool converged = true;
};

struct GroupSolverOptions {
    double tol = 1e-8;
    int max_sweeps = 10000;
    /// Penalty scaling sqrt(|G|) per block (the convention of standard Group
    /// Lasso implementations, and what makes singleton groups collapse to the
    /// plain Lasso). Disable to penalize plain block norms.
    bool sqrt_size_scaling = true;
    std::function<void(int sweep, double objective)> on_sweep;
};

/// Smallest lambda at which every group is inactive:
///   max_k ||X_{G_k}' y / n|| / sqrt(|G_k|).
double group_lambda_max(const Eigen::Ref<const Eigen::MatrixXd>& x,
                        const Eigen::Ref<const Eigen::VectorXd>& y,
                        const GroupStructure& groups, bool sqrt_size_scaling = true);

/// Block coordinate descent with an active-group outer loop. Blocks with a
/// numerically orthonormal Gram are minimized in closed form; other blocks run
/// inner proximal-gradient iterations to tol/10. On return the block
/// subgradient conditions hold within tol:
///   inactive G:  ||X_G'(y - Xb)/n|| <= lambda sqrt(|G|) + tol
///   active G:    ||X_G'(y - Xb)/n - lambda sqrt(|G|) b_G/||b_G|| || <= tol
///
/// Overlapping structures are solved by latent-variable replication: each
/// column is duplicated once per containing group, the non-overlapping problem
/// is solved, and replicated coefficients are summed. The certificate then
/// refers to the replicated problem.
GroupFitResult fit_group_lasso(const Eigen::Ref<const Eigen::MatrixXd>& x,
                               const Eigen::Ref<const Eigen::VectorXd>& y,
                               const GroupStructure& groups, double lambda,
                               const std::optional<Eigen::VectorXd>& warm_start = std::nullopt,
                               const GroupSolverOptions& options = {});
GroupFitResult fit_group_lasso(const Dataset& data, const GroupStructure& groups, double lambda,
                               const std::optional<Eigen::VectorXd>& warm_start = std::nullopt,
                               const GroupSolverOptions& options = {});

/// Warm-started fits over a decreasing lambda grid (replication applied once
/// for overlapping structures). Failures are recorded per grid point.
struct GroupLambdaPath {
    std::vector<double> grid;
    std::vector<GroupFitResult> fits;
    std::vector<std::string> failures;
    int total_sweeps = 0;
};

GroupLambdaPath fit_group_lasso_path(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                     const Eigen::Ref<const Eigen::VectorXd>& y,
                                     const GroupStructure& groups, int grid_size,
                                     double lambda_min_ratio,
                                     const GroupSolverOptions& options = {});

/// Latent-variable expansion for overlapping groups: column j appears once per
/// containing group; groups become consecutive non-overlapping blocks.
struct ReplicatedProblem {
    Eigen::MatrixXd x;                 // n x sum_k |G_k|
    std::vector<std::vector<int>> blocks;  // non-overlapping, in group order
    std::vector<int> original_column;  // replicated column -> original column
    int original_p = 0;
};

ReplicatedProblem replicate_overlapping(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                        const GroupStructure& groups);

/// Sum replicated coefficients back to the original columns.
Eigen::VectorXd collapse_replicated(const ReplicatedProblem& rp,
                                    const Eigen::Ref<const Eigen::VectorXd>& v);

/// Block-KKT residual of `beta` (non-overlapping direct check).
double group_kkt_residual(const Eigen::Ref<const Eigen::MatrixXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& y,
                          const GroupStructure& groups, double lambda,
                          const Eigen::Ref<const Eigen::VectorXd>& beta,
                          bool sqrt_size_scaling = true);

}  // namespace coad
