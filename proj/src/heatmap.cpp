#include "ipp/heatmap.hpp"

#include "ipp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace ipp {

Rgb ramp_color(double value) {
    const double v = std::isnan(value) ? 0.0 : std::clamp(value, 0.0, 1.0);
    const double pos = v * static_cast<double>(kHeatRamp.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    if (lo >= kHeatRamp.size() - 1) {
        return kHeatRamp.back();
    }
    const double t = pos - static_cast<double>(lo);
    Rgb out{};
    for (std::size_t c = 0; c < 3; ++c) {
        const double a = kHeatRamp[lo][c];
        const double b = kHeatRamp[lo + 1][c];
        out[c] = static_cast<std::uint8_t>(std::lround(a + t * (b - a)));
    }
    return out;
}

void render_heatmap(std::span<const double> grid, const GridGeometry& geometry, const std::filesystem::path& path,
                    std::span<const Pose> overlay, int scale) {
    if (grid.size() != geometry.cell_count()) {
        throw ConfigError("heatmap grid size does not match the geometry");
    }
    if (scale < 1) {
        throw ConfigError("heatmap scale must be >= 1");
    }
    std::vector<Rgb> cells(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        cells[i] = ramp_color(grid[i]);
    }
    for (const Pose& p : overlay) {
        if (geometry.contains(p.x, p.y)) {
            cells[geometry.index(p.x, p.y)] = kPathColor;
        }
    }
    const int w = geometry.width * scale;
    const int h = geometry.height * scale;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << "P6\n" << w << ' ' << h << "\n255\n";
    std::vector<char> row(static_cast<std::size_t>(w) * 3);
    for (int y = 0; y < geometry.height; ++y) {
        for (int x = 0; x < geometry.width; ++x) {
            const Rgb& c = cells[geometry.index(x, y)];
            for (int s = 0; s < scale; ++s) {
                const auto px = static_cast<std::size_t>(x * scale + s) * 3;
                row[px] = static_cast<char>(c[0]);
                row[px + 1] = static_cast<char>(c[1]);
                row[px + 2] = static_cast<char>(c[2]);
            }
        }
        for (int s = 0; s < scale; ++s) {
            out.write(row.data(), static_cast<std::streamsize>(row.size()));
        }
    }
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

}  // namespace ipp
