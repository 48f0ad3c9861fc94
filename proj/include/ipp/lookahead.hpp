#pragma once

#include "ipp/belief_maps.hpp"
#include "ipp/sensors.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace ipp {

/// Expected-measurement model used by the planners.
struct LookaheadModel {
    FieldOfView fov;
    /// Required for occupancy maps.
    std::optional<ConfusionMatrix> confusion;
};

/// Simulated belief for planning. Holds a read-only view of the live belief
/// plus the changes made by simulated measurements; the interest grid is
/// frozen at construction.
///
/// Gaussian maps fuse predicted measurements equal to the posterior mean, so
/// the mean never moves and only the covariance shrinks. The downdate is kept
/// in factored form, P' = P - G^T G, with one row of G per simulated reading. Occupancy maps fuse each cell's current argmax class.
///
/// The live belief must outlive every copy of the lookahead.
class LookaheadBelief {
public:
    LookaheadBelief(const MapBelief& live, const InterestSpec& spec, const LookaheadModel& model);

    /// Simulates sensing at `pose` and returns the reward of that update,
    /// weighted by the frozen interest grid.
    double advance(Pose pose);

    [[nodiscard]] const GridGeometry& geometry() const { return shared_->geometry; }
    [[nodiscard]] const std::vector<double>& interest() const { return shared_->interest; }
    /// Reward-variant uncertainty per cell.
    [[nodiscard]] const std::vector<double>& uncertainty() const { return uncertainty_; }

    [[nodiscard]] double mean(std::size_t cell) const;
    [[nodiscard]] double variance(std::size_t cell) const;
    /// Occupancy maps only.
    [[nodiscard]] Eigen::RowVectorXd class_probs(std::size_t cell) const;

    [[nodiscard]] bool is_gaussian() const { return shared_->gaussian != nullptr; }

private:
    struct Shared {
        GridGeometry geometry;
        const GaussianMapBelief* gaussian = nullptr;
        const OccupancyMapBelief* occupancy = nullptr;
        std::vector<double> interest;
        LookaheadModel model;
    };

    double advance_gaussian(const std::vector<std::size_t>& cells);
    double advance_occupancy(const std::vector<std::size_t>& cells);

    std::shared_ptr<const Shared> shared_;
    std::vector<double> uncertainty_;
    using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMatrix factor_;        // Gaussian: readings so far x n
    Eigen::MatrixXd probs_;   // occupancy: working copy of the class layers
};

/// Returns a copy of `look` advanced by one simulated measurement at `pose`.
[[nodiscard]] LookaheadBelief simulate_update(const LookaheadBelief& look, Pose pose);

}  // namespace ipp
