#include "coad/dataset.hpp"

#include <cmath>

#include "coad/errors.hpp"

namespace coad {

double empirical_norm(const Eigen::Ref<const Eigen::VectorXd>& v) {
    if (v.size() == 0) return 0.0;
    return std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
}

Eigen::VectorXd Dataset::to_raw_scale(const Eigen::Ref<const Eigen::VectorXd>& beta_std) const {
    if (beta_std.size() != p())
        throw DimensionMismatch("coefficient length does not match p");
    Eigen::VectorXd raw(p());
    for (Eigen::Index j = 0; j < p(); ++j)
        raw[j] = (column_scales[j] == 0.0) ? 0.0 : beta_std[j] / column_scales[j];
    return raw;
}

double Dataset::raw_intercept(const Eigen::Ref<const Eigen::VectorXd>& beta_std) const {
    const Eigen::VectorXd raw = to_raw_scale(beta_std);
    return y_mean - raw.dot(x_means);
}

Dataset standardize(const Eigen::MatrixXd& raw_x, const Eigen::VectorXd& raw_y) {
    const Eigen::Index n = raw_x.rows();
    const Eigen::Index p = raw_x.cols();
    if (n < 2) throw InvalidArgument("standardize: need at least 2 samples");
    if (p < 1) throw InvalidArgument("standardize: need at least 1 covariate");
    if (raw_y.size() != n)
        throw DimensionMismatch("standardize: y length " + std::to_string(raw_y.size()) +
                                " does not match n = " + std::to_string(n));

    Dataset ds;
    ds.x_means = raw_x.colwise().mean();
    ds.y_mean = raw_y.mean();
    ds.x = raw_x.rowwise() - ds.x_means.transpose();
    ds.y = raw_y.array() - ds.y_mean;
    ds.column_scales.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double s = empirical_norm(ds.x.col(j));
        ds.column_scales[j] = s;
        if (s == 0.0) {
            ds.constant_columns.push_back(static_cast<int>(j));
        } else {
            ds.x.col(j) /= s;
        }
    }
    return ds;
}

double estimation_error(const Eigen::Ref<const Eigen::VectorXd>& beta_hat,
                        const Eigen::Ref<const Eigen::VectorXd>& beta_true) {
    if (beta_hat.size() != beta_true.size())
        throw DimensionMismatch("estimation_error: vector lengths differ");
    return (beta_hat - beta_true).squaredNorm();
}

}  // namespace coad
