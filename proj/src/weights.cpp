#include "coad/weights.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "coad/errors.hpp"

namespace coad {

const char* weight_kind_name(WeightKind kind) {
    switch (kind) {
        case WeightKind::adaptive: return "adaptive";
        case WeightKind::coadaptive_nonoverlap: return "coadaptive";
        case WeightKind::coadaptive_min: return "coadaptive-min";
        case WeightKind::coadaptive_sum: return "coadaptive-sum";
        case WeightKind::coadaptive_trimmed: return "coadaptive-trimmed";
    }
    return "?";
}

Eigen::VectorXd group_norms(const Eigen::Ref<const Eigen::VectorXd>& beta,
                            const GroupStructure& groups) {
    if (beta.size() != groups.p()) throw DimensionMismatch("group_norms: beta length != p");
    Eigen::VectorXd norms(groups.num_groups());
    for (int k = 0; k < groups.num_groups(); ++k) {
        double ss = 0.0;
        for (int j : groups.group(k)) ss += beta[j] * beta[j];
        norms[k] = std::sqrt(ss);
    }
    return norms;
}

namespace {

/// sqrt(|G|)/||b_G|| per group; +inf for zero norms.
Eigen::VectorXd per_group_weight(const Eigen::VectorXd& norms, const GroupStructure& groups) {
    Eigen::VectorXd gw(groups.num_groups());
    for (int k = 0; k < groups.num_groups(); ++k) {
        const double size = static_cast<double>(groups.group(k).size());
        gw[k] = norms[k] > 0.0 ? std::sqrt(size) / norms[k] : kInf;
    }
    return gw;
}

/// Trimmed squared group sum: keep the ceil((1 - f)|G|) largest squared
/// entries, dropping the smallest remainder.
double trimmed_group_sq(const Eigen::Ref<const Eigen::VectorXd>& beta,
                        const std::vector<int>& group, double trim_fraction) {
    const int size = static_cast<int>(group.size());
    const int keep =
        static_cast<int>(std::ceil((1.0 - trim_fraction) * static_cast<double>(size)));
    std::vector<double> sq(size);
    for (int i = 0; i < size; ++i) sq[i] = beta[group[i]] * beta[group[i]];
    std::sort(sq.begin(), sq.end(), std::greater<>());
    double s = 0.0;
    for (int i = 0; i < keep; ++i) s += sq[i];
    return s;
}

}  // namespace

WeightVector compute_weights(const Eigen::Ref<const Eigen::VectorXd>& beta_initial,
                             const GroupStructure& groups, const WeightScheme& scheme) {
    if (beta_initial.size() != groups.p())
        throw DimensionMismatch("compute_weights: beta length != p");
    if (scheme.kind == WeightKind::coadaptive_trimmed &&
        !(scheme.trim_fraction >= 0.0 && scheme.trim_fraction < 0.5))
        throw InvalidArgument("trim fraction must lie in [0, 0.5)");
    if (scheme.kind != WeightKind::coadaptive_trimmed && scheme.trim_fraction != 0.0)
        throw InvalidArgument("trim fraction only applies to the trimmed scheme");

    const int p = groups.p();

    if (scheme.kind == WeightKind::adaptive) {
        // Group-size-1 specialization: same formula, singleton structure.
        return compute_weights(beta_initial, GroupStructure::singletons(p),
                               WeightScheme::nonoverlap());
    }
    if (scheme.kind == WeightKind::coadaptive_nonoverlap && groups.overlapping())
        throw SchemeGroupMismatch(
            "the non-overlapping co-adaptive scheme cannot serve overlapping groups; "
            "use the min/sum/trimmed variants");

    Eigen::VectorXd w(p);
    if (scheme.kind == WeightKind::coadaptive_trimmed) {
        Eigen::VectorXd gw(groups.num_groups());
        for (int k = 0; k < groups.num_groups(); ++k) {
            const double sq = trimmed_group_sq(beta_initial, groups.group(k), scheme.trim_fraction);
            const double size = static_cast<double>(groups.group(k).size());
            gw[k] = sq > 0.0 ? std::sqrt(size / sq) : kInf;
        }
        for (int j = 0; j < p; ++j) {
            double m = kInf;
            for (int k : groups.groups_of(j)) m = std::min(m, gw[k]);
            w[j] = m;
        }
        return WeightVector(w);
    }

    const Eigen::VectorXd gw = per_group_weight(group_norms(beta_initial, groups), groups);
    for (int j = 0; j < p; ++j) {
        const auto& ks = groups.groups_of(j);
        if (scheme.kind == WeightKind::coadaptive_sum) {
            double s = 0.0;
            for (int k : ks) s += gw[k];
            w[j] = s;  // +inf propagates from any zero-norm member
        } else {
            // nonoverlap (unique k) and min share the reduction
            double m = kInf;
            for (int k : ks) m = std::min(m, gw[k]);
            w[j] = m;
        }
    }
    return WeightVector(w);
}

WeightSeparationStats weight_separation_stats(const WeightVector& weights,
                                              const SparsityPattern& pattern) {
    const int p = weights.size();
    for (int j : pattern.stilde)
        if (j < 0 || j >= p) throw IndexOutOfRange("pattern index outside weight length");

    WeightSeparationStats stats;
    std::set<int> t(pattern.s.begin(), pattern.s.end());
    std::set<int> stilde(pattern.stilde.begin(), pattern.stilde.end());

    for (int j = 0; j < p; ++j) {
        const double wj = weights.w[j];
        if (t.count(j)) {
            stats.t_empty = false;
            stats.w_plus_t = std::max(stats.w_plus_t, wj);
        } else if (stilde.count(j)) {
            stats.stilde_minus_t_empty = false;
            stats.w_minus_stilde_minus_t = std::min(stats.w_minus_stilde_minus_t, wj);
        } else {
            stats.stilde_c_empty = false;
            stats.w_minus_stilde_c = std::min(stats.w_minus_stilde_c, wj);
        }
    }
    return stats;
}

}  // namespace coad
