#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>

namespace ipp {

struct CmaEsOptions {
    int population = 0;  // lambda; 0 selects 4 + floor(3 ln n)
    double sigma0 = 0.3;
    int max_generations = 1000;
    int max_evaluations = 0;  // 0 = unlimited
    double target_fitness = -std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
};

struct CmaEsResult {
    Eigen::VectorXd best;
    double best_fitness = std::numeric_limits<double>::infinity();
    int evaluations = 0;
    int generations = 0;
};

/// Minimises `fitness` with (mu/mu_w, lambda)-CMA-ES using rank-one and
/// rank-mu covariance updates and cumulative step-size adaptation, with the
/// default weights and learning rates. The start point is evaluated first, so
/// with zero generations the result is `x0`.
[[nodiscard]] CmaEsResult cmaes_minimize(const std::function<double(const Eigen::VectorXd&)>& fitness,
                                         const Eigen::VectorXd& x0, const CmaEsOptions& options);

}  // namespace ipp
