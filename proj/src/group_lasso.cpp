#include "coad/group_lasso.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "coad/errors.hpp"
#include "coad/solver.hpp"

namespace coad {

namespace {

double block_scale(const GroupStructure& groups, int k, bool sqrt_scaling) {
    return sqrt_scaling ? std::sqrt(static_cast<double>(groups.group(k).size())) : 1.0;
}

/// (1 - tau/||v||)_+ v
Eigen::VectorXd block_soft_threshold(const Eigen::VectorXd& v, double tau) {
    const double nv = v.norm();
    if (nv <= tau) return Eigen::VectorXd::Zero(v.size());
    return (1.0 - tau / nv) * v;
}

struct BlockCache {
    Eigen::MatrixXd xg;    // n x |G|
    Eigen::MatrixXd gram;  // |G| x |G|, X_G'X_G/n
    double lip = 0.0;      // largest Gram eigenvalue
    bool orthonormal = false;
    bool ready = false;
};

class GroupCd {
  public:
    GroupCd(const Eigen::Ref<const Eigen::MatrixXd>& x,
            const Eigen::Ref<const Eigen::VectorXd>& y, const GroupStructure& groups,
            const GroupSolverOptions& opts)
        : x_(x), y_(y), groups_(groups), opts_(opts), n_(static_cast<double>(x.rows())) {
        cache_.resize(groups.num_groups());
        ever_active_seen_.assign(groups.num_groups(), false);
    }

    GroupFitResult run(double lambda, const std::optional<Eigen::VectorXd>& warm_start);

  private:
    const BlockCache& cache(int k) {
        BlockCache& c = cache_[k];
        if (!c.ready) {
            const auto& g = groups_.group(k);
            const int m = static_cast<int>(g.size());
            c.xg.resize(x_.rows(), m);
            for (int i = 0; i < m; ++i) c.xg.col(i) = x_.col(g[i]);
            c.gram = c.xg.transpose() * c.xg / n_;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.gram);
            c.lip = es.eigenvalues().maxCoeff();
            c.orthonormal =
                (c.gram - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-12;
            c.ready = true;
        }
        return c;
    }

    void activate(int k) {
        if (ever_active_seen_[k]) return;
        ever_active_seen_[k] = true;
        ever_active_.push_back(k);
    }

    /// Minimize the block objective given z = X_G'r_other/n. Returns new b.
    Eigen::VectorXd solve_block(int k, const Eigen::VectorXd& z, double tau,
                                Eigen::VectorXd b) const {
        const BlockCache& c = cache_[k];
        if (c.orthonormal) return block_soft_threshold(z, tau);
        if (z.norm() <= tau) return Eigen::VectorXd::Zero(z.size());
        // Inner proximal gradient to a tenth of the outer tolerance.
        const double inner_tol = opts_.tol / 10.0;
        const double step = 1.0 / c.lip;
        for (int it = 0; it < 100000; ++it) {
            const Eigen::VectorXd grad = c.gram * b - z;
            b = block_soft_threshold(b - step * grad, step * tau);
            const double viol =
                b.isZero(0.0) ? std::max(0.0, z.norm() - tau)
                              : (c.gram * b - z + tau * b.normalized()).norm();
            if (viol <= inner_tol) break;
        }
        return b;
    }

    const Eigen::Ref<const Eigen::MatrixXd>& x_;
    const Eigen::Ref<const Eigen::VectorXd>& y_;
    const GroupStructure& groups_;
    const GroupSolverOptions& opts_;
    double n_;
    std::vector<BlockCache> cache_;
    std::vector<int> ever_active_;
    std::vector<bool> ever_active_seen_;
};

GroupFitResult GroupCd::run(double lambda, const std::optional<Eigen::VectorXd>& warm_start) {
    const int p = static_cast<int>(x_.cols());
    const int q = groups_.num_groups();
    if (lambda < 0.0) throw InvalidArgument("lambda must be nonnegative");

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    if (warm_start) {
        if (warm_start->size() != p) throw DimensionMismatch("warm start length mismatch");
        beta = *warm_start;
    }

    Eigen::VectorXd r = y_ - x_ * beta;
    for (int k = 0; k < q; ++k) {
        for (int j : groups_.group(k)) {
            if (beta[j] != 0.0) {
                activate(k);
                cache(k);
                break;
            }
        }
    }

    const double target = 0.25 * opts_.tol;
    int sweeps = 0;
    double kkt = kInf;
    bool converged = false;

    const auto record_sweep = [&]() {
        ++sweeps;
        if (opts_.on_sweep) {
            double pen = 0.0;
            for (int k = 0; k < q; ++k) {
                double ss = 0.0;
                for (int j : groups_.group(k)) ss += beta[j] * beta[j];
                pen += block_scale(groups_, k, opts_.sqrt_size_scaling) * std::sqrt(ss);
            }
            opts_.on_sweep(sweeps, 0.5 * r.squaredNorm() / n_ + lambda * pen);
        }
    };

    const auto block_violation = [&](int k, const Eigen::VectorXd& xgr_over_n,
                                     const Eigen::VectorXd& bg, double tau) {
        if (bg.isZero(0.0)) return std::max(0.0, xgr_over_n.norm() - tau);
        return (xgr_over_n - tau * bg.normalized()).norm();
    };

    while (sweeps < opts_.max_sweeps) {
        // Sweep ever-active groups to convergence.
        while (sweeps < opts_.max_sweeps) {
            for (int k : ever_active_) {
                const BlockCache& c = cache(k);
                const auto& g = groups_.group(k);
                const int m = static_cast<int>(g.size());
                Eigen::VectorXd bg(m);
                for (int i = 0; i < m; ++i) bg[i] = beta[g[i]];
                const Eigen::VectorXd z = c.xg.transpose() * r / n_ + c.gram * bg;
                const double tau = lambda * block_scale(groups_, k, opts_.sqrt_size_scaling);
                const Eigen::VectorXd bg_new = solve_block(k, z, tau, bg);
                if ((bg_new - bg).isZero(0.0)) continue;
                r -= c.xg * (bg_new - bg);
                for (int i = 0; i < m; ++i) beta[g[i]] = bg_new[i];
            }
            record_sweep();
            double active_kkt = 0.0;
            for (int k : ever_active_) {
                const BlockCache& c = cache_[k];
                const auto& g = groups_.group(k);
                Eigen::VectorXd bg(g.size());
                for (std::size_t i = 0; i < g.size(); ++i) bg[i] = beta[g[i]];
                const double tau = lambda * block_scale(groups_, k, opts_.sqrt_size_scaling);
                active_kkt =
                    std::max(active_kkt, block_violation(k, c.xg.transpose() * r / n_, bg, tau));
            }
            if (active_kkt <= target) break;
        }

        // Full pass: exact residual correlations for every group.
        const Eigen::VectorXd xtr = x_.transpose() * r / n_;
        record_sweep();
        kkt = 0.0;
        std::vector<int> violators;
        for (int k = 0; k < q; ++k) {
            const auto& g = groups_.group(k);
            Eigen::VectorXd xgr(g.size()), bg(g.size());
            bool active = false;
            for (std::size_t i = 0; i < g.size(); ++i) {
                xgr[i] = xtr[g[i]];
                bg[i] = beta[g[i]];
                active = active || bg[i] != 0.0;
            }
            const double tau = lambda * block_scale(groups_, k, opts_.sqrt_size_scaling);
            const double v = block_violation(k, xgr, bg, tau);
            kkt = std::max(kkt, v);
            if (!active && v > target && !ever_active_seen_[k]) violators.push_back(k);
        }
        if (!std::isfinite(kkt)) throw NonFinite("group lasso: residual became non-finite");
        if (kkt <= target) {
            converged = true;
            break;
        }
        for (int k : violators) {
            activate(k);
            cache(k);
        }
    }

    double pen = 0.0;
    std::vector<int> active_groups;
    for (int k = 0; k < q; ++k) {
        double ss = 0.0;
        for (int j : groups_.group(k)) ss += beta[j] * beta[j];
        if (ss > 0.0) active_groups.push_back(k);
        pen += block_scale(groups_, k, opts_.sqrt_size_scaling) * std::sqrt(ss);
    }

    GroupFitResult res;
    res.beta = beta;
    res.lambda = lambda;
    res.active_groups = std::move(active_groups);
    res.block_kkt_residual = kkt;
    res.sweeps = sweeps;
    res.objective = 0.5 * r.squaredNorm() / n_ + lambda * pen;
    res.converged = converged || kkt <= opts_.tol;
    if (!std::isfinite(res.objective)) throw NonFinite("group lasso: objective non-finite");
    if (!res.converged)
        throw NonConvergence("group lasso: sweep budget exhausted at block kkt residual " +
                                 std::to_string(kkt),
                             FitResult{.beta = res.beta,
                                       .lambda = lambda,
                                       .active_set = {},
                                       .kkt_residual = kkt,
                                       .sweeps = sweeps,
                                       .objective = res.objective,
                                       .converged = false});
    return res;
}

}  // namespace

double group_lambda_max(const Eigen::Ref<const Eigen::MatrixXd>& x,
                        const Eigen::Ref<const Eigen::VectorXd>& y, const GroupStructure& groups,
                        bool sqrt_size_scaling) {
    const double n = static_cast<double>(x.rows());
    const Eigen::VectorXd xty = x.transpose() * y / n;
    double lam = 0.0;
    for (int k = 0; k < groups.num_groups(); ++k) {
        double ss = 0.0;
        for (int j : groups.group(k)) ss += xty[j] * xty[j];
        lam = std::max(lam, std::sqrt(ss) / block_scale(groups, k, sqrt_size_scaling));
    }
    return lam;
}

ReplicatedProblem replicate_overlapping(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                        const GroupStructure& groups) {
    ReplicatedProblem rp;
    rp.original_p = groups.p();
    int total = 0;
    for (int k = 0; k < groups.num_groups(); ++k)
        total += static_cast<int>(groups.group(k).size());
    rp.x.resize(x.rows(), total);
    rp.blocks.resize(groups.num_groups());
    rp.original_column.resize(total);
    int c = 0;
    for (int k = 0; k < groups.num_groups(); ++k) {
        for (int j : groups.group(k)) {
            rp.x.col(c) = x.col(j);
            rp.original_column[c] = j;
            rp.blocks[k].push_back(c);
            ++c;
        }
    }
    return rp;
}

Eigen::VectorXd collapse_replicated(const ReplicatedProblem& rp,
                                    const Eigen::Ref<const Eigen::VectorXd>& v) {
    if (v.size() != static_cast<Eigen::Index>(rp.original_column.size()))
        throw DimensionMismatch("collapse_replicated: length mismatch");
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(rp.original_p);
    for (Eigen::Index c = 0; c < v.size(); ++c) beta[rp.original_column[c]] += v[c];
    return beta;
}

GroupFitResult fit_group_lasso(const Eigen::Ref<const Eigen::MatrixXd>& x,
                               const Eigen::Ref<const Eigen::VectorXd>& y,
                               const GroupStructure& groups, double lambda,
                               const std::optional<Eigen::VectorXd>& warm_start,
                               const GroupSolverOptions& options) {
    if (groups.p() != x.cols()) throw DimensionMismatch("groups do not match design width");
    if (!groups.overlapping()) {
        GroupCd cd(x, y, groups, options);
        return cd.run(lambda, warm_start);
    }
    // Latent-variable route: duplicate columns per containing group, solve the
    // non-overlapping problem, sum replicas.
    const ReplicatedProblem rp = replicate_overlapping(x, groups);
    const GroupStructure repl_groups(rp.blocks, static_cast<int>(rp.x.cols()));
    GroupCd cd(rp.x, y, repl_groups, options);
    GroupFitResult res = cd.run(lambda, std::nullopt);
    res.beta = collapse_replicated(rp, res.beta);
    return res;
}

GroupFitResult fit_group_lasso(const Dataset& data, const GroupStructure& groups, double lambda,
                               const std::optional<Eigen::VectorXd>& warm_start,
                               const GroupSolverOptions& options) {
    return fit_group_lasso(data.x, data.y, groups, lambda, warm_start, options);
}

GroupLambdaPath fit_group_lasso_path(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                     const Eigen::Ref<const Eigen::VectorXd>& y,
                                     const GroupStructure& groups, int grid_size,
                                     double lambda_min_ratio, const GroupSolverOptions& options) {
    GroupLambdaPath path;
    path.grid = lambda_grid(group_lambda_max(x, y, groups, options.sqrt_size_scaling), grid_size,
                            lambda_min_ratio);

    // Replicate once up front for overlapping structures.
    const bool overlap = groups.overlapping();
    std::optional<ReplicatedProblem> rp;
    std::optional<GroupStructure> repl_groups;
    if (overlap) {
        rp = replicate_overlapping(x, groups);
        repl_groups.emplace(rp->blocks, static_cast<int>(rp->x.cols()));
    }
    const Eigen::Ref<const Eigen::MatrixXd> xx = overlap ? rp->x : x;
    const GroupStructure& gg = overlap ? *repl_groups : groups;

    GroupCd cd(xx, y, gg, options);
    std::optional<Eigen::VectorXd> warm;
    for (double lam : path.grid) {
        try {
            GroupFitResult fit = cd.run(lam, warm);
            warm = fit.beta;
            path.total_sweeps += fit.sweeps;
            if (overlap) fit.beta = collapse_replicated(*rp, fit.beta);
            path.fits.push_back(std::move(fit));
            path.failures.emplace_back();
        } catch (const NonConvergence& e) {
            warm = e.best.beta;
            path.total_sweeps += e.best.sweeps;
            GroupFitResult failed;
            failed.beta = overlap ? collapse_replicated(*rp, e.best.beta) : e.best.beta;
            failed.lambda = lam;
            failed.block_kkt_residual = e.best.kkt_residual;
            failed.sweeps = e.best.sweeps;
            failed.objective = e.best.objective;
            failed.converged = false;
            path.fits.push_back(std::move(failed));
            path.failures.emplace_back(e.what());
        }
    }
    return path;
}

double group_kkt_residual(const Eigen::Ref<const Eigen::MatrixXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& y,
                          const GroupStructure& groups, double lambda,
                          const Eigen::Ref<const Eigen::VectorXd>& beta,
                          bool sqrt_size_scaling) {
    const double n = static_cast<double>(x.rows());
    const Eigen::VectorXd xtr = x.transpose() * (y - x * beta) / n;
    double kkt = 0.0;
    for (int k = 0; k < groups.num_groups(); ++k) {
        const auto& g = groups.group(k);
        Eigen::VectorXd xgr(g.size()), bg(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            xgr[i] = xtr[g[i]];
            bg[i] = beta[g[i]];
        }
        const double tau = lambda * block_scale(groups, k, sqrt_size_scaling);
        const double v = bg.isZero(0.0) ? std::max(0.0, xgr.norm() - tau)
                                        : (xgr - tau * bg.normalized()).norm();
        kkt = std::max(kkt, v);
    }
    return kkt;
}

}  // namespace coad
