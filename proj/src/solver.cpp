#include "coad/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace coad {

WeightVector::WeightVector(Eigen::VectorXd weights) : w(std::move(weights)) {
    for (Eigen::Index j = 0; j < w.size(); ++j) {
        if (std::isnan(w[j]) || w[j] < 0.0)
            throw InvalidArgument("weights must be nonnegative and not NaN");
    }
}

bool WeightVector::any_finite() const {
    for (Eigen::Index j = 0; j < w.size(); ++j)
        if (std::isfinite(w[j])) return true;
    return false;
}

double soft_threshold(double z, double gamma) {
    if (gamma == kInf) return 0.0;
    const double mag = std::abs(z) - gamma;
    return mag > 0.0 ? (z > 0.0 ? mag : -mag) : 0.0;
}

double lambda_max(const Eigen::Ref<const Eigen::MatrixXd>& x,
                  const Eigen::Ref<const Eigen::VectorXd>& y, const WeightVector& weights) {
    if (!weights.any_finite()) throw AllExcluded("lambda_max: every weight is infinite");
    const double n = static_cast<double>(x.rows());
    const Eigen::VectorXd xty = x.transpose() * y / n;
    double lam = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double wj = weights.w[j];
        if (wj == kInf) continue;
        if (wj == 0.0) {
            if (xty[j] != 0.0) return kInf;  // unpenalized coordinate never zeroed
            continue;
        }
        lam = std::max(lam, std::abs(xty[j]) / wj);
    }
    return lam;
}

double lambda_max(const Dataset& data, const WeightVector& weights) {
    return lambda_max(data.x, data.y, weights);
}

std::vector<double> lambda_grid(double lam_max, int grid_size, double lambda_min_ratio) {
    if (grid_size < 2) throw InvalidArgument("grid_size must be at least 2");
    if (!(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0))
        throw InvalidArgument("lambda_min_ratio must lie in (0, 1)");
    if (!(lam_max > 0.0) || !std::isfinite(lam_max))
        throw InvalidArgument("lambda_max must be positive and finite for a grid");
    std::vector<double> grid(grid_size);
    const double log_max = std::log(lam_max);
    const double log_min = std::log(lam_max * lambda_min_ratio);
    for (int i = 0; i < grid_size; ++i) {
        const double f = static_cast<double>(i) / (grid_size - 1);
        grid[i] = std::exp(log_max + f * (log_min - log_max));
    }
    grid.front() = lam_max;  // exact endpoint, no exp/log round-trip
    return grid;
}

namespace {

std::vector<int> support_of(const Eigen::VectorXd& beta) {
    std::vector<int> s;
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        if (beta[j] != 0.0) s.push_back(static_cast<int>(j));
    return s;
}

/// Workspace for one coordinate-descent solve. Gram columns x'x_j/n are
/// computed once per ever-active coordinate and reused.
class CdWorkspace {
  public:
    CdWorkspace(const Eigen::Ref<const Eigen::MatrixXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& y)
        : x_(x), n_(static_cast<double>(x.rows())), p_(static_cast<int>(x.cols())) {
        xty_ = x_.transpose() * y / n_;
        diag_ = x_.colwise().squaredNorm() / n_;
        yty_ = y.squaredNorm() / n_;
        slot_.assign(p_, -1);
        gram_.resize(p_, 0);
    }

    int p() const { return p_; }
    const Eigen::VectorXd& xty() const { return xty_; }
    double diag(int j) const { return diag_[j]; }

    const std::vector<int>& ever_active() const { return ever_active_; }

    void activate(int j) {
        if (slot_[j] >= 0) return;
        const int s = static_cast<int>(ever_active_.size());
        if (s == gram_.cols()) {
            const int grow = std::min(p_, std::max(16, 2 * s));
            Eigen::MatrixXd bigger(p_, grow);
            bigger.leftCols(s) = gram_.leftCols(s);
            gram_.swap(bigger);
        }
        gram_.col(s) = x_.transpose() * x_.col(j) / n_;
        slot_[j] = s;
        ever_active_.push_back(j);
    }

    /// Gram column for an ever-active coordinate.
    Eigen::Ref<const Eigen::VectorXd> gram_col(int j) const { return gram_.col(slot_[j]); }

    /// Full gradient x'(y - X b)/n from the cached columns of supp(b).
    Eigen::VectorXd full_gradient(const Eigen::VectorXd& beta) const {
        Eigen::VectorXd g = xty_;
        for (int j : ever_active_)
            if (beta[j] != 0.0) g -= beta[j] * gram_.col(slot_[j]);
        return g;
    }

    /// ||y - X b||_n^2 via cached inner products: b restricted to ever-active.
    double rss(const Eigen::VectorXd& beta, const Eigen::VectorXd& g_full) const {
        double bx = 0.0, bg = 0.0;
        for (int j : ever_active_) {
            bx += beta[j] * xty_[j];
            bg += beta[j] * g_full[j];
        }
        return yty_ - bx - bg;
    }

  private:
    const Eigen::Ref<const Eigen::MatrixXd>& x_;
    double n_;
    int p_;
    Eigen::VectorXd xty_, diag_;
    double yty_ = 0.0;
    Eigen::MatrixXd gram_;          // p x (#ever-active), column j at slot_[j]
    std::vector<int> slot_;
    std::vector<int> ever_active_;  // discovery order, cyclic sweep order
};

double penalty_value(const WeightVector& w, double lambda, const Eigen::VectorXd& beta) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        if (beta[j] == 0.0) continue;
        s += w.w[j] * std::abs(beta[j]);
    }
    return lambda * s;
}

/// Stationarity violation of a single coordinate given its gradient value.
double coord_violation(double g, double beta, double lw) {
    if (beta != 0.0) return std::abs(g - (beta > 0.0 ? lw : -lw));
    return std::max(0.0, std::abs(g) - lw);
}

}  // namespace

double kkt_residual(const Eigen::Ref<const Eigen::MatrixXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& y, const WeightVector& weights,
                    double lambda, const Eigen::Ref<const Eigen::VectorXd>& beta) {
    const double n = static_cast<double>(x.rows());
    const Eigen::VectorXd g = x.transpose() * (y - x * beta) / n;
    double resid = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (weights.w[j] == kInf) continue;
        resid = std::max(resid, coord_violation(g[j], beta[j], lambda * weights.w[j]));
    }
    return resid;
}

double lasso_objective(const Eigen::Ref<const Eigen::MatrixXd>& x,
                       const Eigen::Ref<const Eigen::VectorXd>& y, const WeightVector& weights,
                       double lambda, const Eigen::Ref<const Eigen::VectorXd>& beta) {
    const double n = static_cast<double>(x.rows());
    const double rss = (y - x * beta).squaredNorm() / n;
    Eigen::VectorXd b = beta;
    return 0.5 * rss + penalty_value(weights, lambda, b);
}

FitResult fit_weighted_lasso(const Eigen::Ref<const Eigen::MatrixXd>& x,
                             const Eigen::Ref<const Eigen::VectorXd>& y,
                             const WeightVector& weights, double lambda,
                             const std::optional<Eigen::VectorXd>& warm_start,
                             const SolverOptions& options) {
    const int p = static_cast<int>(x.cols());
    const Eigen::Index n = x.rows();
    if (weights.size() != p) throw DimensionMismatch("weights length does not match p");
    if (y.size() != n) throw DimensionMismatch("y length does not match n");
    if (lambda < 0.0) throw InvalidArgument("lambda must be nonnegative");

    if (lambda == 0.0) {
        // Unpenalized problem: restricted least squares on the finite-weight set.
        std::vector<int> free;
        for (int j = 0; j < p; ++j)
            if (weights.w[j] != kInf) free.push_back(j);
        if (static_cast<Eigen::Index>(free.size()) > n)
            throw InvalidArgument(
                "lambda = 0 with more finite-weight covariates than samples is ill-posed; "
                "use a positive lambda floor");
        FitResult res;
        res.beta = ols_restricted(x, y, free);
        res.lambda = 0.0;
        res.active_set = support_of(res.beta);
        res.kkt_residual = kkt_residual(x, y, weights, 0.0, res.beta);
        res.objective = lasso_objective(x, y, weights, 0.0, res.beta);
        res.sweeps = 1;
        return res;
    }

    // Interior target below tol so returned iterates have slack for
    // downstream comparisons; acceptance uses tol itself.
    const double target = 0.25 * options.tol;

    CdWorkspace ws(x, y);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    if (warm_start) {
        if (warm_start->size() != p) throw DimensionMismatch("warm start length mismatch");
        beta = *warm_start;
        for (int j = 0; j < p; ++j)
            if (weights.is_excluded(j)) beta[j] = 0.0;
    }
    if (!weights.any_finite()) {
        // Everything excluded: the fit is trivially zero.
        FitResult res;
        res.beta = Eigen::VectorXd::Zero(p);
        res.lambda = lambda;
        res.kkt_residual = 0.0;
        res.objective = 0.5 * y.squaredNorm() / static_cast<double>(n);
        res.sweeps = 0;
        return res;
    }

    for (int j = 0; j < p; ++j)
        if (beta[j] != 0.0) ws.activate(j);

    // Gradient on the ever-active set, kept in sync incrementally and
    // resynced from scratch at every full KKT pass.
    auto active_gradient = [&]() {
        Eigen::VectorXd g_full = ws.full_gradient(beta);
        return g_full;
    };
    Eigen::VectorXd g = active_gradient();  // full-length; trusted on ever-active entries

    int sweeps = 0;
    double best_kkt = kInf;
    Eigen::VectorXd best_beta = beta;

    const auto active_kkt = [&]() {
        double r = 0.0;
        for (int j : ws.ever_active()) {
            if (weights.is_excluded(j)) continue;
            r = std::max(r, coord_violation(g[j], beta[j], lambda * weights.w[j]));
        }
        return r;
    };

    const auto record_sweep = [&]() {
        ++sweeps;
        if (options.on_sweep) {
            const double obj = 0.5 * ws.rss(beta, ws.full_gradient(beta)) +
                               penalty_value(weights, lambda, beta);
            options.on_sweep(sweeps, obj);
        }
    };

    bool converged = false;
    double kkt = kInf;
    while (sweeps < options.max_sweeps) {
        // Phase 1: cycle over the ever-active coordinates to convergence.
        while (sweeps < options.max_sweeps) {
            for (int j : ws.ever_active()) {
                if (weights.is_excluded(j)) continue;
                const double dj = ws.diag(j);
                if (dj == 0.0) continue;  // zero column cannot move
                const double z = g[j] + beta[j] * dj;
                const double bj = soft_threshold(z, lambda * weights.w[j]) / dj;
                const double del = bj - beta[j];
                if (del == 0.0) continue;
                beta[j] = bj;
                const auto col = ws.gram_col(j);
                for (int k : ws.ever_active()) g[k] -= del * col[k];
            }
            record_sweep();
            if (active_kkt() <= target) break;
        }

        // Phase 2: full KKT pass; resyncs the gradient and recruits violators.
        g = ws.full_gradient(beta);
        record_sweep();
        kkt = 0.0;
        int worst = -1;
        std::vector<int> violators;
        for (int j = 0; j < p; ++j) {
            if (weights.is_excluded(j)) continue;
            const double v = coord_violation(g[j], beta[j], lambda * weights.w[j]);
            if (v > kkt) {
                kkt = v;
                worst = j;
            }
            if (v > target && beta[j] == 0.0) violators.push_back(j);
        }
        (void)worst;
        if (kkt < best_kkt) {
            best_kkt = kkt;
            best_beta = beta;
        }
        if (!std::isfinite(kkt))
            throw NonFinite("weighted lasso: gradient became non-finite");
        if (kkt <= target) {
            converged = true;
            break;
        }
        for (int j : violators) ws.activate(j);
    }

    if (!converged && best_kkt > options.tol) {
        FitResult best;
        best.beta = best_beta;
        best.lambda = lambda;
        best.active_set = support_of(best_beta);
        best.kkt_residual = best_kkt;
        best.sweeps = sweeps;
        best.converged = false;
        best.objective = lasso_objective(x, y, weights, lambda, best_beta);
        throw NonConvergence("weighted lasso: sweep budget exhausted at kkt residual " +
                                 std::to_string(best_kkt),
                             best);
    }
    if (!converged) {
        beta = best_beta;  // met tol but not the interior target
        kkt = best_kkt;
        g = ws.full_gradient(beta);
    }

    FitResult res;
    res.beta = beta;
    res.lambda = lambda;
    res.active_set = support_of(beta);
    res.kkt_residual = kkt;
    res.sweeps = sweeps;
    res.objective = 0.5 * ws.rss(beta, g) + penalty_value(weights, lambda, beta);
    if (!std::isfinite(res.objective))
        throw NonFinite("weighted lasso: objective became non-finite");
    return res;
}

FitResult fit_weighted_lasso(const Dataset& data, const WeightVector& weights, double lambda,
                             const std::optional<Eigen::VectorXd>& warm_start,
                             const SolverOptions& options) {
    return fit_weighted_lasso(data.x, data.y, weights, lambda, warm_start, options);
}

bool LambdaPath::all_ok() const {
    for (const auto& f : failures)
        if (!f.empty()) return false;
    return true;
}

LambdaPath fit_lasso_path(const Eigen::Ref<const Eigen::MatrixXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& y,
                          const WeightVector& weights, int grid_size, double lambda_min_ratio,
                          const SolverOptions& options) {
    LambdaPath path;
    path.grid = lambda_grid(lambda_max(x, y, weights), grid_size, lambda_min_ratio);
    path.fits.reserve(grid_size);
    path.failures.reserve(grid_size);
    std::optional<Eigen::VectorXd> warm;
    for (double lam : path.grid) {
        try {
            FitResult fit = fit_weighted_lasso(x, y, weights, lam, warm, options);
            warm = fit.beta;
            path.total_sweeps += fit.sweeps;
            path.fits.push_back(std::move(fit));
            path.failures.emplace_back();
        } catch (const NonConvergence& e) {
            warm = e.best.beta;  // keep the path going from the best iterate
            path.total_sweeps += e.best.sweeps;
            path.fits.push_back(e.best);
            path.failures.emplace_back(e.what());
        }
    }
    return path;
}

LambdaPath fit_lasso_path(const Dataset& data, const WeightVector& weights, int grid_size,
                          double lambda_min_ratio, const SolverOptions& options) {
    return fit_lasso_path(data.x, data.y, weights, grid_size, lambda_min_ratio, options);
}

Eigen::VectorXd ols_restricted(const Eigen::Ref<const Eigen::MatrixXd>& x,
                               const Eigen::Ref<const Eigen::VectorXd>& y,
                               const std::vector<int>& t) {
    const int p = static_cast<int>(x.cols());
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    if (t.empty()) return beta;
    for (int j : t)
        if (j < 0 || j >= p) throw IndexOutOfRange("ols_restricted: column out of range");

    const int m = static_cast<int>(t.size());
    Eigen::MatrixXd xt(x.rows(), m);
    for (int i = 0; i < m; ++i) xt.col(i) = x.col(t[i]);

    const Eigen::MatrixXd gram = xt.transpose() * xt;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    const double emax = es.eigenvalues().maxCoeff();
    const double emin = es.eigenvalues().minCoeff();
    if (!(emax > 0.0) || emin / emax < 1e-12)
        throw SingularGram("ols_restricted: restricted Gram matrix is numerically singular", t);

    const Eigen::VectorXd bt = es.eigenvectors() *
                               (es.eigenvectors().transpose() * (xt.transpose() * y)).cwiseQuotient(
                                   es.eigenvalues());
    for (int i = 0; i < m; ++i) beta[t[i]] = bt[i];
    return beta;
}

Eigen::VectorXd ols_restricted(const Dataset& data, const std::vector<int>& t) {
    return ols_restricted(data.x, data.y, t);
}

}  // namespace coad
