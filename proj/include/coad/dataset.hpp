#pragma once

#include <Eigen/Core>
#include <vector>

namespace coad {

/// Empirical L2 norm sqrt(mean(v_i^2)); the loss (1/2)||y - X b||_n^2 and all
/// solver math use this convention.
double empirical_norm(const Eigen::Ref<const Eigen::VectorXd>& v);

/// Centered and rescaled regression data. Columns of `x` have mean zero and
/// unit empirical norm (except flagged constant columns, which are kept as
/// zero columns so group index files stay valid); `y` has mean zero.
///
/// The original scaling is retained so fits can be reported on the raw scale.
struct Dataset {
    Eigen::MatrixXd x;              // n x p, standardized
    Eigen::VectorXd y;              // length n, centered
    Eigen::VectorXd column_scales;  // empirical norms of centered raw columns (0 for constant)
    Eigen::VectorXd x_means;        // raw column means
    double y_mean = 0.0;
    std::vector<int> constant_columns;  // 0-based, flagged not dropped

    Eigen::Index n() const { return x.rows(); }
    Eigen::Index p() const { return x.cols(); }

    bool is_constant_column(int j) const { return column_scales[j] == 0.0; }

    /// Map standardized-scale coefficients back to the raw scale.
    /// Constant columns map to zero (they carry no fit).
    Eigen::VectorXd to_raw_scale(const Eigen::Ref<const Eigen::VectorXd>& beta_std) const;

    /// Intercept on the raw scale for a standardized-scale fit.
    double raw_intercept(const Eigen::Ref<const Eigen::VectorXd>& beta_std) const;
};

/// Center and rescale raw data so the Dataset invariants hold.
/// Constant columns are flagged (see Dataset), not dropped.
/// Throws DimensionMismatch or InvalidArgument (n < 2 or p < 1).
Dataset standardize(const Eigen::MatrixXd& raw_x, const Eigen::VectorXd& raw_y);

/// Squared Euclidean distance ||beta_hat - beta_true||^2.
double estimation_error(const Eigen::Ref<const Eigen::VectorXd>& beta_hat,
                        const Eigen::Ref<const Eigen::VectorXd>& beta_true);

}  // namespace coad
