#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <variant>
#include <vector>

namespace ipp {

/// Equidistant grid over the unit square. Row 0 is north; cell (x, y) has
/// linear index y * width + x.
struct GridGeometry {
    int width = 0;
    int height = 0;

    GridGeometry() = default;
    GridGeometry(int w, int h);

    [[nodiscard]] std::size_t cell_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    [[nodiscard]] double cell_size() const { return 1.0 / static_cast<double>(std::max(width, height)); }
    [[nodiscard]] bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
    [[nodiscard]] std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
    }
    [[nodiscard]] int col(std::size_t idx) const { return static_cast<int>(idx % static_cast<std::size_t>(width)); }
    [[nodiscard]] int row(std::size_t idx) const { return static_cast<int>(idx / static_cast<std::size_t>(width)); }

    struct Point {
        double x;
        double y;
    };
    [[nodiscard]] Point center(std::size_t idx) const;

    bool operator==(const GridGeometry&) const = default;
};

enum class FeatureKind { Continuous, Discrete };

/// Ground-truth feature field. Continuous values lie in [lower, upper];
/// discrete values are class ids 1..classes stored as integral doubles.
struct TerrainField {
    GridGeometry geometry;
    FeatureKind kind = FeatureKind::Continuous;
    int classes = 0;
    double lower = 0.0;
    double upper = 1.0;
    std::vector<double> values;

    [[nodiscard]] double at(int x, int y) const { return values[geometry.index(x, y)]; }
    [[nodiscard]] int label(std::size_t idx) const { return static_cast<int>(values[idx]); }
};

struct ContinuousInterest {
    double threshold = 0.4;
    double lower = 0.0;  // f_a
    double upper = 1.0;  // f_b
};

struct DiscreteInterest {
    std::set<int> classes;
    int class_count = 0;  // K
};

/// Which feature values are interesting.
using InterestSpec = std::variant<ContinuousInterest, DiscreteInterest>;

[[nodiscard]] FeatureKind kind_of(const InterestSpec& spec);

/// Throws ConfigError when bounds or class ids are out of range.
void validate(const InterestSpec& spec);

/// Whole feature range interesting (f_th <= f_a, or every class listed).
[[nodiscard]] bool is_exploration(const InterestSpec& spec);

[[nodiscard]] TerrainField generate_continuous_field(std::uint64_t seed, const GridGeometry& geometry,
                                                     double correlation_length);

[[nodiscard]] TerrainField generate_discrete_field(std::uint64_t seed, const GridGeometry& geometry, int classes,
                                                   double correlation_length);

/// Reads a CSV grid or a binary P5 PGM. Continuous rasters are rescaled to
/// [0, 1] (constant rasters map to 0.5); discrete rasters enumerate distinct
/// values in ascending order as class ids 1..D.
[[nodiscard]] TerrainField load_raster(const std::filesystem::path& path, FeatureKind kind);

[[nodiscard]] std::vector<bool> interest_mask(const TerrainField& field, const InterestSpec& spec);

}  // namespace ipp
