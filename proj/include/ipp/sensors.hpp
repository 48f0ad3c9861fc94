#pragma once

#include "ipp/grid_world.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace ipp {

/// Robot position p_t as a grid cell.
struct Pose {
    int x = 0;
    int y = 0;

    bool operator==(const Pose&) const = default;
};

/// Square (2h+1) x (2h+1) window centred on the robot, clipped at the borders.
struct FieldOfView {
    int half_extent = 1;
};

struct ContinuousSensorModel {
    double noise_std = 0.1;
};

/// Row-stochastic K x K matrix: entry (i, j) = p(observe class j+1 | true class i+1).
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(Eigen::MatrixXd matrix);

    /// Diagonal `correct`, remaining mass spread uniformly over the other classes.
    [[nodiscard]] static ConfusionMatrix uniform_noise(int classes, double correct);

    [[nodiscard]] int classes() const { return static_cast<int>(matrix_.rows()); }
    /// Class ids are 1-based.
    [[nodiscard]] double likelihood(int true_class, int observed_class) const {
        return matrix_(true_class - 1, observed_class - 1);
    }
    [[nodiscard]] const Eigen::MatrixXd& matrix() const { return matrix_; }

private:
    Eigen::MatrixXd matrix_;
};

/// One reading per observed cell. For semantic measurements `value` holds the
/// observed class id.
struct Sample {
    std::size_t cell = 0;
    double value = 0.0;
};

struct Measurement {
    std::vector<Sample> samples;
    int step = 0;

    [[nodiscard]] bool empty() const { return samples.empty(); }
};

/// Cell indices inside the clipped window, row-major.
[[nodiscard]] std::vector<std::size_t> fov_cells(const GridGeometry& geometry, Pose pose, FieldOfView fov);

using RandomStream = std::mt19937_64;

[[nodiscard]] Measurement sense_continuous(const TerrainField& field, Pose pose, FieldOfView fov,
                                           const ContinuousSensorModel& model, RandomStream& rng, int step = 0);

[[nodiscard]] Measurement sense_semantic(const TerrainField& field, Pose pose, FieldOfView fov,
                                         const ConfusionMatrix& confusion, RandomStream& rng, int step = 0);

}  // namespace ipp
