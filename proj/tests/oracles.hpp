#pragma once
// Independent reference computations shared by the unit and acceptance tests.

#include "ipp/belief_maps.hpp"
#include "ipp/grid_world.hpp"
#include "ipp/planners.hpp"
#include "ipp/reward_metrics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                           double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson quadrature of f over [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
    if (b <= a) {
        return 0.0;
    }
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, 60);
}

/// Mass of N(mu, sigma^2) above `threshold` by numeric integration of the
/// density; the tail beyond 40 sigma is negligible.
inline double gaussian_mass_above(double mu, double sigma, double threshold) {
    auto pdf = [&](double x) {
        const double z = (x - mu) / sigma;
        return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    };
    const double hi = mu + 40.0 * sigma;
    if (threshold >= hi) {
        return 0.0;
    }
    double total = 0.0;
    double a = threshold;
    // Split at the mode and at +-1..8 sigma so the peak is never straddled.
    for (int k = -8; k <= 40; ++k) {
        const double edge = mu + k * sigma;
        if (edge > a) {
            total += adaptive_simpson(pdf, a, edge);
            a = edge;
        }
    }
    return total;
}

/// Prior covariance over cell centres straight from the kernel formula.
inline Eigen::MatrixXd brute_gram(const ipp::GridGeometry& g, const ipp::MaternKernel& k) {
    const auto n = static_cast<Eigen::Index>(g.cell_count());
    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto a = g.center(static_cast<std::size_t>(i));
            const auto b = g.center(static_cast<std::size_t>(j));
            const double d = std::hypot(a.x - b.x, a.y - b.y);
            const double r = std::sqrt(3.0) * d / k.lengthscale;
            gram(i, j) = k.signal_variance * (1.0 + r) * std::exp(-r);
        }
        gram(i, i) += ipp::kGramJitter;
    }
    return gram;
}

struct BatchPosterior {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
};

/// Closed-form GP regression on all readings at once.
inline BatchPosterior batch_gp(const Eigen::MatrixXd& prior_cov, double prior_mean, double noise_variance,
                               const std::vector<ipp::Sample>& samples) {
    const auto n = prior_cov.rows();
    const auto m = static_cast<Eigen::Index>(samples.size());
    Eigen::MatrixXd kxs(m, n);
    Eigen::MatrixXd kxx(m, m);
    Eigen::VectorXd resid(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto ci = static_cast<Eigen::Index>(samples[static_cast<std::size_t>(i)].cell);
        kxs.row(i) = prior_cov.row(ci);
        resid(i) = samples[static_cast<std::size_t>(i)].value - prior_mean;
        for (Eigen::Index j = 0; j < m; ++j) {
            kxx(i, j) = prior_cov(ci, static_cast<Eigen::Index>(samples[static_cast<std::size_t>(j)].cell));
        }
        kxx(i, i) += noise_variance;
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(kxx);
    BatchPosterior post;
    post.mean = Eigen::VectorXd::Constant(n, prior_mean) + kxs.transpose() * lu.solve(resid);
    post.covariance = prior_cov - kxs.transpose() * lu.solve(kxs);
    return post;
}

/// Pure-exploration greedy: fuse the expected reading (the posterior mean)
/// with a full copy of the belief and score the unweighted relative variance
/// reduction. First maximum in compass order wins; values within a relative
/// 1e-12 are ties, as summation order alone can split mirror-symmetric moves.
inline ipp::Action exploration_greedy(const ipp::GaussianMapBelief& belief, ipp::Pose pose, ipp::FieldOfView fov) {
    const auto& g = belief.geometry;
    ipp::Action best = ipp::Action::N;
    double best_value = -1.0;
    for (ipp::Action a : ipp::feasible_actions(pose, g)) {
        const ipp::Pose next = ipp::apply_action(pose, a, g);
        ipp::Measurement m;
        for (std::size_t c : ipp::fov_cells(g, next, fov)) {
            m.samples.push_back({c, belief.mean(static_cast<Eigen::Index>(c))});
        }
        const auto after = ipp::gp_fuse(belief, m);
        double value = 0.0;
        for (std::size_t i = 0; i < g.cell_count(); ++i) {
            const double h0 = belief.variance(i);
            if (h0 != 0.0) {
                value += (h0 - after.variance(i)) / h0;
            }
        }
        if (value > best_value + 1e-12 * std::max(1.0, std::abs(best_value))) {
            best_value = value;
            best = a;
        }
    }
    return best;
}

struct ClassScores {
    double miou = 0.0;
    double f1 = 0.0;
};

/// mIoU and macro F1 (x100) from an explicit confusion table over the classes
/// present in the ground truth.
inline ClassScores confusion_table_scores(const std::vector<int>& truth, const std::vector<int>& pred, int classes) {
    std::vector<std::vector<int>> table(static_cast<std::size_t>(classes + 1),
                                        std::vector<int>(static_cast<std::size_t>(classes + 1), 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++table[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(pred[i])];
    }
    double iou_sum = 0.0;
    double f1_sum = 0.0;
    int present = 0;
    for (int c = 1; c <= classes; ++c) {
        int tp = table[c][c];
        int fn = 0;
        int fp = 0;
        for (int o = 1; o <= classes; ++o) {
            if (o != c) {
                fn += table[c][o];
                fp += table[o][c];
            }
        }
        if (tp + fn == 0) {
            continue;
        }
        ++present;
        iou_sum += static_cast<double>(tp) / (tp + fp + fn);
        f1_sum += 2.0 * tp / (2.0 * tp + fp + fn);
    }
    return {100.0 * iou_sum / present, 100.0 * f1_sum / present};
}

}  // namespace oracle
