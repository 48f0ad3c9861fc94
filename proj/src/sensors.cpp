#include "ipp/sensors.hpp"

#include "ipp/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ipp {

ConfusionMatrix::ConfusionMatrix(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 2) {
        throw ConfigError("confusion matrix must be square with K >= 2");
    }
    for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
        if ((matrix_.row(i).array() < 0.0).any()) {
            throw ConfigError("confusion matrix entries must be non-negative");
        }
        if (std::abs(matrix_.row(i).sum() - 1.0) > 1e-9) {
            throw ConfigError("confusion matrix row " + std::to_string(i + 1) + " does not sum to 1");
        }
    }
}

ConfusionMatrix ConfusionMatrix::uniform_noise(int classes, double correct) {
    if (classes < 2) {
        throw ConfigError("confusion matrix needs K >= 2");
    }
    if (!(correct >= 0.0 && correct <= 1.0)) {
        throw ConfigError("confusion diagonal must lie in [0, 1]");
    }
    const double off = (1.0 - correct) / (classes - 1);
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(classes, classes, off);
    m.diagonal().setConstant(correct);
    return ConfusionMatrix(std::move(m));
}

std::vector<std::size_t> fov_cells(const GridGeometry& geometry, Pose pose, FieldOfView fov) {
    if (!geometry.contains(pose.x, pose.y)) {
        throw ConfigError("pose outside the grid");
    }
    if (fov.half_extent < 0) {
        throw ConfigError("field of view half extent must be >= 0");
    }
    std::vector<std::size_t> cells;
    const int x0 = std::max(0, pose.x - fov.half_extent);
    const int x1 = std::min(geometry.width - 1, pose.x + fov.half_extent);
    const int y0 = std::max(0, pose.y - fov.half_extent);
    const int y1 = std::min(geometry.height - 1, pose.y + fov.half_extent);
    cells.reserve(static_cast<std::size_t>((x1 - x0 + 1) * (y1 - y0 + 1)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            cells.push_back(geometry.index(x, y));
        }
    }
    return cells;
}

Measurement sense_continuous(const TerrainField& field, Pose pose, FieldOfView fov,
                             const ContinuousSensorModel& model, RandomStream& rng, int step) {
    if (field.kind != FeatureKind::Continuous) {
        throw ConfigError("continuous sensor needs a continuous field");
    }
    if (!(model.noise_std >= 0.0)) {
        throw ConfigError("sensor noise_std must be >= 0");
    }
    Measurement m;
    m.step = step;
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t cell : fov_cells(field.geometry, pose, fov)) {
        const double eps = noise(rng);
        m.samples.push_back({cell, field.values[cell] + model.noise_std * eps});
    }
    return m;
}

Measurement sense_semantic(const TerrainField& field, Pose pose, FieldOfView fov, const ConfusionMatrix& confusion,
                           RandomStream& rng, int step) {
    if (field.kind != FeatureKind::Discrete) {
        throw ConfigError("semantic sensor needs a discrete field");
    }
    if (confusion.classes() != field.classes) {
        throw ConfigError("confusion matrix dimension does not match the class count");
    }
    Measurement m;
    m.step = step;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t cell : fov_cells(field.geometry, pose, fov)) {
        const int truth = field.label(cell);
        // Inverse-CDF draw over the confusion row; falls back to the last
        // class with positive mass when rounding leaves u above the total.
        const double u = unit(rng);
        double acc = 0.0;
        int observed = 0;
        for (int j = 1; j <= confusion.classes(); ++j) {
            const double p = confusion.likelihood(truth, j);
            if (p > 0.0) {
                observed = j;
            }
            acc += p;
            if (u < acc) {
                break;
            }
        }
        m.samples.push_back({cell, static_cast<double>(observed)});
    }
    return m;
}

}  // namespace ipp
