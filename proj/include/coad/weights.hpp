#pragma once

#include <Eigen/Core>

#include "coad/groups.hpp"
#include "coad/solver.hpp"

namespace coad {

/// How second-stage penalty weights are pooled from a first-stage estimate.
enum class WeightKind {
    adaptive,               // 1/|b_j| (singleton groups)
    coadaptive_nonoverlap,  // sqrt(|G|)/||b_G|| for the unique G containing j
    coadaptive_min,         // min over G containing j (overlap-capable)
    coadaptive_sum,         // sum over G containing j (Group-Lasso-style overlap)
    coadaptive_trimmed,     // min variant on trimmed squared group sums
};

struct WeightScheme {
    WeightKind kind = WeightKind::coadaptive_nonoverlap;
    double trim_fraction = 0.0;  // only meaningful for coadaptive_trimmed, in [0, 0.5)

    static WeightScheme adaptive() { return {WeightKind::adaptive, 0.0}; }
    static WeightScheme nonoverlap() { return {WeightKind::coadaptive_nonoverlap, 0.0}; }
    static WeightScheme min() { return {WeightKind::coadaptive_min, 0.0}; }
    static WeightScheme sum() { return {WeightKind::coadaptive_sum, 0.0}; }
    static WeightScheme trimmed(double f) { return {WeightKind::coadaptive_trimmed, f}; }
};

const char* weight_kind_name(WeightKind kind);

/// Euclidean norm of beta restricted to each group, in group order.
Eigen::VectorXd group_norms(const Eigen::Ref<const Eigen::VectorXd>& beta,
                            const GroupStructure& groups);

/// Penalty weights from a first-stage estimate. A zero pooled group norm
/// yields w_j = +inf (hard exclusion). The adaptive kind runs the
/// non-overlapping formula on singleton groups rather than separate code.
/// Throws SchemeGroupMismatch when the scheme cannot serve the structure.
WeightVector compute_weights(const Eigen::Ref<const Eigen::VectorXd>& beta_initial,
                             const GroupStructure& groups, const WeightScheme& scheme);

/// Weight separation diagnostics: max over T, min over complement of S-tilde,
/// min over S-tilde minus T, with T taken as the pattern's support set.
/// Empty index sets flag and default to 0 for the max / +inf for the minima.
struct WeightSeparationStats {
    double w_plus_t = 0.0;
    double w_minus_stilde_c = kInf;
    double w_minus_stilde_minus_t = kInf;
    bool t_empty = true;
    bool stilde_c_empty = true;
    bool stilde_minus_t_empty = true;
};

WeightSeparationStats weight_separation_stats(const WeightVector& weights,
                                              const SparsityPattern& pattern);

}  // namespace coad
