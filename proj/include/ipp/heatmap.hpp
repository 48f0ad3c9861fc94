#pragma once

#include "ipp/grid_world.hpp"
#include "ipp/sensors.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace ipp {

using Rgb = std::array<std::uint8_t, 3>;

/// Eight-stop viridis-like ramp, low to high.
inline constexpr std::array<Rgb, 8> kHeatRamp = {{{68, 1, 84},
                                                  {70, 50, 126},
                                                  {54, 92, 141},
                                                  {39, 127, 142},
                                                  {31, 161, 135},
                                                  {74, 193, 109},
                                                  {160, 218, 57},
                                                  {253, 231, 37}}};

inline constexpr Rgb kPathColor = {255, 0, 0};

/// Linear interpolation along the ramp; values are clamped to [0, 1].
[[nodiscard]] Rgb ramp_color(double value);

/// Writes a binary P6 image, `scale` pixels per cell, with the optional pose
/// path drawn over the cells it visits.
void render_heatmap(std::span<const double> grid, const GridGeometry& geometry, const std::filesystem::path& path,
                    std::span<const Pose> overlay = {}, int scale = 1);

}  // namespace ipp
