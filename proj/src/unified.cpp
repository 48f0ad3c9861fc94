#include "ipp/unified.hpp"

#include "ipp/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

namespace ipp {

double normal_upper_tail(double z) {
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

double interest_probability(double mean, double stddev, const ContinuousInterest& spec) {
    if (spec.threshold <= spec.lower) {
        return 1.0;
    }
    if (stddev <= 1e-12) {
        return mean >= spec.threshold ? 1.0 : 0.0;
    }
    return normal_upper_tail((spec.threshold - mean) / stddev);
}

double interest_probability(const MapBelief& belief, const InterestSpec& spec, std::size_t cell) {
    if (const auto* g = std::get_if<GaussianMapBelief>(&belief)) {
        const auto* c = std::get_if<ContinuousInterest>(&spec);
        if (c == nullptr) {
            throw ConfigError("Gaussian map needs a continuous interest spec");
        }
        const auto i = static_cast<Eigen::Index>(cell);
        return interest_probability(g->mean(i), std::sqrt(std::max(0.0, g->variance(cell))), *c);
    }
    const auto& o = std::get<OccupancyMapBelief>(belief);
    const auto* d = std::get_if<DiscreteInterest>(&spec);
    if (d == nullptr) {
        throw ConfigError("occupancy map needs a discrete interest spec");
    }
    if (static_cast<int>(d->classes.size()) == o.classes) {
        return 1.0;
    }
    double p = 0.0;
    for (int c : d->classes) {
        if (c < 1 || c > o.classes) {
            throw ConfigError("interesting class outside 1..K");
        }
        p += o.probs(static_cast<Eigen::Index>(cell), c - 1);
    }
    return std::min(1.0, p);
}

std::vector<double> interest_grid(const MapBelief& belief, const InterestSpec& spec) {
    const std::size_t n = geometry_of(belief).cell_count();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = interest_probability(belief, spec, i);
    }
    return out;
}

UnifiedState assemble_state(const MapBelief& belief, const InterestSpec& spec, Pose pose, double remaining_budget,
                            const Hyperparams& hyperparams) {
    UnifiedState state;
    state.geometry = geometry_of(belief);
    if (!state.geometry.contains(pose.x, pose.y)) {
        throw ConfigError("pose outside the grid");
    }
    state.interest = interest_grid(belief, spec);
    state.uncertainty = uncertainty_grid(belief, UncertaintyVariant::StateSpace);
    state.pose = pose;
    state.remaining_budget = remaining_budget;
    state.hyperparams = hyperparams;
    return state;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> parse_row(const std::string& line) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        row.push_back(std::strtod(cell.c_str(), nullptr));
    }
    return row;
}

}  // namespace

void export_state_raster(const UnifiedState& state, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    const auto& g = state.geometry;
    for (const auto* layer : {&state.interest, &state.uncertainty}) {
        for (int y = 0; y < g.height; ++y) {
            for (int x = 0; x < g.width; ++x) {
                out << (x ? "," : "") << fmt((*layer)[g.index(x, y)]);
            }
            out << '\n';
        }
    }
    const auto* c = std::get_if<ContinuousInterest>(&state.hyperparams.interest);
    const double threshold = c ? c->threshold : std::numeric_limits<double>::quiet_NaN();
    out << state.pose.x << ',' << state.pose.y << ',' << fmt(state.remaining_budget) << ',' << fmt(threshold) << ','
        << fmt(state.hyperparams.lengthscale_encoding) << '\n';
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

StateRaster read_state_raster(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IngestError("cannot open state raster " + path.string());
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            rows.push_back(parse_row(line));
        }
    }
    if (rows.size() < 5 || rows.size() % 2 == 0) {
        throw IngestError("state raster has an unexpected row count");
    }
    const std::size_t height = (rows.size() - 1) / 2;
    const std::size_t width = rows.front().size();
    StateRaster r;
    r.geometry = GridGeometry(static_cast<int>(width), static_cast<int>(height));
    for (std::size_t y = 0; y < 2 * height; ++y) {
        if (rows[y].size() != width) {
            throw IngestError("ragged state raster row");
        }
        auto& layer = y < height ? r.interest : r.uncertainty;
        layer.insert(layer.end(), rows[y].begin(), rows[y].end());
    }
    const auto& scalars = rows.back();
    if (scalars.size() != 5) {
        throw IngestError("state raster scalar row needs 5 entries");
    }
    r.pose = {static_cast<int>(scalars[0]), static_cast<int>(scalars[1])};
    r.remaining_budget = scalars[2];
    r.threshold = scalars[3];
    r.lengthscale_encoding = scalars[4];
    return r;
}

}  // namespace ipp
