#pragma once

#include "ipp/grid_world.hpp"
#include "ipp/sensors.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <variant>

namespace ipp {

/// Matérn kernel with smoothness fixed at 3/2.
struct MaternKernel {
    double lengthscale = 0.35;
    double signal_variance = 1.0;
};

[[nodiscard]] double kernel_eval(GridGeometry::Point a, GridGeometry::Point b, const MaternKernel& kernel);

inline constexpr double kGramJitter = 1e-8;

/// Dense joint Gaussian over all cell centres. Measurements are snapped to
/// cell centres, so sequential fusion equals batch GP regression exactly.
struct GaussianMapBelief {
    GridGeometry geometry;
    MaternKernel kernel;
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    double noise_variance = 0.01;

    [[nodiscard]] double variance(std::size_t cell) const { return covariance(static_cast<Eigen::Index>(cell),
                                                                              static_cast<Eigen::Index>(cell)); }
};

struct OccupancyClamp {
    double p_min = 0.01;
    double p_max = 0.99;
};

/// Per-cell categorical distribution over K classes; row `cell`, column `class - 1`.
struct OccupancyMapBelief {
    GridGeometry geometry;
    int classes = 3;
    OccupancyClamp clamp;
    Eigen::MatrixXd probs;

    /// Lower bound actually enforced by the clamp: p_min, relaxed to
    /// (1 - p_max) / (K - 1) when both bounds cannot hold at once.
    [[nodiscard]] double effective_floor() const;
};

using MapBelief = std::variant<GaussianMapBelief, OccupancyMapBelief>;

[[nodiscard]] const GridGeometry& geometry_of(const MapBelief& belief);

[[nodiscard]] GaussianMapBelief gp_init(const GridGeometry& geometry, const MaternKernel& kernel, double prior_mean,
                                        double noise_variance);

/// Exact Gaussian conditioning on the batch (repeated cells allowed).
/// Throws NumericalError when the innovation matrix is not positive-definite.
[[nodiscard]] GaussianMapBelief gp_fuse(const GaussianMapBelief& belief, const Measurement& m);
void gp_fuse_in_place(GaussianMapBelief& belief, const Measurement& m);

[[nodiscard]] OccupancyMapBelief occ_init(const GridGeometry& geometry, int classes, OccupancyClamp clamp);

[[nodiscard]] OccupancyMapBelief occ_fuse(const OccupancyMapBelief& belief, const Measurement& m,
                                          const ConfusionMatrix& confusion);
void occ_fuse_in_place(OccupancyMapBelief& belief, const Measurement& m, const ConfusionMatrix& confusion);

/// Bayes update of one categorical distribution followed by the clamp.
void occ_update_cell(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> probs, int observed_class, const ConfusionMatrix& confusion,
                     OccupancyClamp clamp);

/// Bounded renormalisation: entries past a bound are pinned to it and the
/// remaining entries are rescaled to keep the total at one.
void clamp_distribution(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> probs, double floor, double ceiling);

enum class UncertaintyVariant { StateSpace, Reward };

/// Variance for Gaussian maps; Shannon entropy (nats) or its exponential for
/// occupancy maps.
[[nodiscard]] double cell_uncertainty(const MapBelief& belief, std::size_t cell, UncertaintyVariant variant);
[[nodiscard]] std::vector<double> uncertainty_grid(const MapBelief& belief, UncertaintyVariant variant);

[[nodiscard]] double shannon_entropy(const Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>& probs);

/// Writes the mean and variance layers (Gaussian) or one probability layer
/// per class (occupancy), each preceded by a `# layer` line.
void write_belief_csv(const MapBelief& belief, const std::filesystem::path& path);

}  // namespace ipp
