#pragma once

#include <Eigen/Core>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "coad/dataset.hpp"
#include "coad/errors.hpp"

namespace coad {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Per-covariate penalty weights in [0, +inf]. +inf means the covariate is
/// excluded (coefficient pinned to 0 exactly); 0 means unpenalized.
struct WeightVector {
    Eigen::VectorXd w;

    explicit WeightVector(Eigen::VectorXd weights);
    static WeightVector ones(int p) { return WeightVector(Eigen::VectorXd::Ones(p)); }

    int size() const { return static_cast<int>(w.size()); }
    bool any_finite() const;
    bool is_excluded(int j) const { return w[j] == kInf; }
};

/// Solution of one weighted-Lasso problem, on the standardized scale.
struct FitResult {
    Eigen::VectorXd beta;
    double lambda = 0.0;
    std::vector<int> active_set;   // j with beta_j != 0, ascending
    double kkt_residual = 0.0;     // max stationarity violation at return
    int sweeps = 0;                // coordinate sweeps + full KKT passes
    double objective = 0.0;        // (1/2)||y - X b||_n^2 + lambda sum w_j |b_j|
    bool converged = true;
};

/// Raised when the sweep budget is exhausted; carries the best iterate.
struct NonConvergence : Error {
    NonConvergence(std::string msg, FitResult best_iterate)
        : Error(std::move(msg)), best(std::move(best_iterate)) {}
    FitResult best;
};

struct SolverOptions {
    double tol = 1e-8;       // KKT residual accepted at return
    int max_sweeps = 10000;
    /// Test hook, called once per coordinate sweep with the current objective.
    std::function<void(int sweep, double objective)> on_sweep;
};

/// sign(z) * max(|z| - gamma, 0). gamma = +inf maps everything to 0.
double soft_threshold(double z, double gamma);

/// Smallest lambda with an all-zero solution:
///   max over finite-weight j of |x_j' y / n| / w_j.
/// Throws AllExcluded if no finite weight exists.
double lambda_max(const Eigen::Ref<const Eigen::MatrixXd>& x,
                  const Eigen::Ref<const Eigen::VectorXd>& y,
                  const WeightVector& weights);
double lambda_max(const Dataset& data, const WeightVector& weights);

/// Weighted Lasso
///   min_b (1/2)||y - X b||_n^2 + lambda sum_j w_j |b_j|
/// by cyclic coordinate descent with cached Gram columns and an active-set
/// outer loop. On return the subgradient conditions hold within tol:
///   active j:               |x_j'(y - Xb)/n - lambda w_j sign(b_j)| <= tol
///   inactive finite-w j:    |x_j'(y - Xb)/n| <= lambda w_j + tol
/// Coordinates with w_j = +inf are exactly zero.
///
/// lambda = 0 solves the unpenalized restricted least squares problem and is
/// refused when p > n (use a positive floor instead).
FitResult fit_weighted_lasso(const Eigen::Ref<const Eigen::MatrixXd>& x,
                             const Eigen::Ref<const Eigen::VectorXd>& y,
                             const WeightVector& weights, double lambda,
                             const std::optional<Eigen::VectorXd>& warm_start = std::nullopt,
                             const SolverOptions& options = {});
FitResult fit_weighted_lasso(const Dataset& data, const WeightVector& weights, double lambda,
                             const std::optional<Eigen::VectorXd>& warm_start = std::nullopt,
                             const SolverOptions& options = {});

/// Pathwise fits on a log-spaced grid from lambda_max down to
/// lambda_min_ratio * lambda_max, warm-starting each fit from its neighbour.
struct LambdaPath {
    std::vector<double> grid;          // strictly decreasing, grid[0] = lambda_max
    std::vector<FitResult> fits;       // one per grid value (best iterate on failure)
    std::vector<std::string> failures; // empty string when the fit succeeded
    int total_sweeps = 0;

    bool all_ok() const;
};

LambdaPath fit_lasso_path(const Eigen::Ref<const Eigen::MatrixXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& y,
                          const WeightVector& weights, int grid_size, double lambda_min_ratio,
                          const SolverOptions& options = {});
LambdaPath fit_lasso_path(const Dataset& data, const WeightVector& weights, int grid_size,
                          double lambda_min_ratio, const SolverOptions& options = {});

/// Log-spaced grid helper shared by the path and cross-validation.
std::vector<double> lambda_grid(double lam_max, int grid_size, double lambda_min_ratio);

/// Least squares restricted to columns t (zeros elsewhere):
///   b_T = (X_T' X_T)^{-1} X_T' y.
/// Throws SingularGram when the Gram reciprocal condition estimate < 1e-12.
Eigen::VectorXd ols_restricted(const Eigen::Ref<const Eigen::MatrixXd>& x,
                               const Eigen::Ref<const Eigen::VectorXd>& y,
                               const std::vector<int>& t);
Eigen::VectorXd ols_restricted(const Dataset& data, const std::vector<int>& t);

/// Max stationarity violation of `beta` for the weighted-Lasso objective;
/// the certificate checked by tests and reported in FitResult.
double kkt_residual(const Eigen::Ref<const Eigen::MatrixXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& y,
                    const WeightVector& weights, double lambda,
                    const Eigen::Ref<const Eigen::VectorXd>& beta);

/// Weighted-Lasso objective value (empirical-norm convention).
double lasso_objective(const Eigen::Ref<const Eigen::MatrixXd>& x,
                       const Eigen::Ref<const Eigen::VectorXd>& y,
                       const WeightVector& weights, double lambda,
                       const Eigen::Ref<const Eigen::VectorXd>& beta);

}  // namespace coad
