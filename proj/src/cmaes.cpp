#include "ipp/cmaes.hpp"

#include "ipp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace ipp {

CmaEsResult cmaes_minimize(const std::function<double(const Eigen::VectorXd&)>& fitness, const Eigen::VectorXd& x0,
                           const CmaEsOptions& options) {
    const auto n = x0.size();
    if (n < 1) {
        throw ConfigError("CMA-ES needs at least one dimension");
    }
    const double dn = static_cast<double>(n);
    const int lambda = options.population > 0 ? options.population : 4 + static_cast<int>(std::floor(3.0 * std::log(dn)));
    if (lambda < 4) {
        throw ConfigError("CMA-ES population must be >= 4");
    }
    if (!(options.sigma0 > 0.0)) {
        throw ConfigError("CMA-ES sigma0 must be > 0");
    }
    const int mu = lambda / 2;

    Eigen::VectorXd weights(mu);
    for (int i = 0; i < mu; ++i) {
        weights(i) = std::log((lambda + 1.0) / 2.0) - std::log(i + 1.0);
    }
    weights /= weights.sum();
    const double mueff = 1.0 / weights.squaredNorm();

    const double cc = (4.0 + mueff / dn) / (dn + 4.0 + 2.0 * mueff / dn);
    const double cs = (mueff + 2.0) / (dn + mueff + 5.0);
    const double c1 = 2.0 / ((dn + 1.3) * (dn + 1.3) + mueff);
    const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((dn + 2.0) * (dn + 2.0) + mueff));
    const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (dn + 1.0)) - 1.0) + cs;
    const double chi_n = std::sqrt(dn) * (1.0 - 1.0 / (4.0 * dn) + 1.0 / (21.0 * dn * dn));

    Eigen::VectorXd mean = x0;
    double sigma = options.sigma0;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd scales = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd path_c = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd path_s = Eigen::VectorXd::Zero(n);

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    CmaEsResult result;
    result.best = x0;
    result.best_fitness = fitness(x0);
    result.evaluations = 1;

    auto budget_left = [&]() {
        return options.max_evaluations <= 0 || result.evaluations < options.max_evaluations;
    };

    std::vector<Eigen::VectorXd> steps(static_cast<std::size_t>(lambda), Eigen::VectorXd(n));
    std::vector<double> values(static_cast<std::size_t>(lambda));
    std::vector<int> order(static_cast<std::size_t>(lambda));

    for (int gen = 0; gen < options.max_generations; ++gen) {
        if (result.best_fitness <= options.target_fitness || !budget_left()) {
            break;
        }
        int sampled = 0;
        for (int k = 0; k < lambda && budget_left(); ++k) {
            Eigen::VectorXd z(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                z(i) = normal(rng);
            }
            steps[static_cast<std::size_t>(k)] = basis * scales.cwiseProduct(z);
            const Eigen::VectorXd x = mean + sigma * steps[static_cast<std::size_t>(k)];
            values[static_cast<std::size_t>(k)] = fitness(x);
            ++result.evaluations;
            ++sampled;
            if (values[static_cast<std::size_t>(k)] < result.best_fitness) {
                result.best_fitness = values[static_cast<std::size_t>(k)];
                result.best = x;
            }
        }
        result.generations = gen + 1;
        if (sampled < lambda) {
            break;
        }

        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)];
        });

        Eigen::VectorXd step_mean = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < mu; ++i) {
            step_mean += weights(i) * steps[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        }
        mean += sigma * step_mean;

        // C^{-1/2} * step_mean
        const Eigen::VectorXd whitened = basis * (basis.transpose() * step_mean).cwiseQuotient(scales);
        path_s = (1.0 - cs) * path_s + std::sqrt(cs * (2.0 - cs) * mueff) * whitened;
        const double ps_norm = path_s.norm();
        const double decay = 1.0 - std::pow(1.0 - cs, 2.0 * (gen + 1));
        const bool hsig = ps_norm / std::sqrt(decay) / chi_n < 1.4 + 2.0 / (dn + 1.0);
        path_c = (1.0 - cc) * path_c + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * step_mean;

        Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < mu; ++i) {
            const auto& y = steps[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
            rank_mu.noalias() += weights(i) * y * y.transpose();
        }
        const double correction = hsig ? 0.0 : cc * (2.0 - cc);
        cov = (1.0 - c1 - cmu) * cov + c1 * (path_c * path_c.transpose() + correction * cov) + cmu * rank_mu;
        cov = 0.5 * (cov + cov.transpose()).eval();

        sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        basis = eig.eigenvectors();
        scales = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt();
    }
    return result;
}

}  // namespace ipp
