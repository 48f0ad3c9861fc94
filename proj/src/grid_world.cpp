#include "ipp/grid_world.hpp"

#include "ipp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>

namespace ipp {

GridGeometry::GridGeometry(int w, int h) : width(w), height(h) {
    if (w < 2 || h < 2) {
        throw ConfigError("grid must be at least 2x2, got " + std::to_string(w) + "x" + std::to_string(h));
    }
}

GridGeometry::Point GridGeometry::center(std::size_t idx) const {
    const double cs = cell_size();
    return {(col(idx) + 0.5) * cs, (row(idx) + 0.5) * cs};
}

FeatureKind kind_of(const InterestSpec& spec) {
    return std::holds_alternative<ContinuousInterest>(spec) ? FeatureKind::Continuous : FeatureKind::Discrete;
}

void validate(const InterestSpec& spec) {
    if (const auto* c = std::get_if<ContinuousInterest>(&spec)) {
        if (!(c->lower <= c->threshold && c->threshold <= c->upper)) {
            throw ConfigError("threshold must lie inside the feature range");
        }
        return;
    }
    const auto& d = std::get<DiscreteInterest>(spec);
    if (d.class_count < 2) {
        throw ConfigError("discrete interest needs at least 2 classes");
    }
    if (d.classes.empty()) {
        throw ConfigError("interesting class set must not be empty");
    }
    for (int c : d.classes) {
        if (c < 1 || c > d.class_count) {
            throw ConfigError("interesting class " + std::to_string(c) + " outside 1.." +
                              std::to_string(d.class_count));
        }
    }
}

bool is_exploration(const InterestSpec& spec) {
    if (const auto* c = std::get_if<ContinuousInterest>(&spec)) {
        return c->threshold <= c->lower;
    }
    const auto& d = std::get<DiscreteInterest>(spec);
    return static_cast<int>(d.classes.size()) == d.class_count;
}

namespace {

// Normalized 1D Gaussian taps with the given standard deviation in cells.
std::vector<double> gaussian_taps(double sigma_cells, int radius) {
    std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-0.5 * (i * i) / (sigma_cells * sigma_cells));
        taps[static_cast<std::size_t>(i + radius)] = w;
        sum += w;
    }
    for (double& t : taps) {
        t /= sum;
    }
    return taps;
}

void rescale_to_unit(std::vector<double>& values) {
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double span = *hi_it - lo;
    if (!(span > 0.0)) {
        std::fill(values.begin(), values.end(), 0.5);
        return;
    }
    for (double& v : values) {
        v = (v - lo) / span;
    }
    // Force the exact endpoints; the division can land one ulp off.
    *std::min_element(values.begin(), values.end()) = 0.0;
    *std::max_element(values.begin(), values.end()) = 1.0;
}

}  // namespace

TerrainField generate_continuous_field(std::uint64_t seed, const GridGeometry& geometry, double correlation_length) {
    if (geometry.width < 2 || geometry.height < 2) {
        throw ConfigError("invalid grid geometry");
    }
    if (!(correlation_length > 0.0 && correlation_length <= 2.0)) {
        throw ConfigError("correlation_length must be in (0, 2]");
    }
    const double sigma_cells = correlation_length / geometry.cell_size();
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma_cells)));
    const int pw = geometry.width + 2 * radius;
    const int ph = geometry.height + 2 * radius;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> noise(static_cast<std::size_t>(pw) * static_cast<std::size_t>(ph));
    for (double& n : noise) {
        n = normal(rng);
    }

    const auto taps = gaussian_taps(sigma_cells, radius);

    // Separable convolution: horizontal pass over the padded noise, then a
    // vertical pass evaluated only on the cropped output window.
    std::vector<double> horiz(static_cast<std::size_t>(geometry.width) * static_cast<std::size_t>(ph), 0.0);
    for (int y = 0; y < ph; ++y) {
        for (int x = 0; x < geometry.width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += taps[static_cast<std::size_t>(k + radius)] *
                       noise[static_cast<std::size_t>(y) * pw + static_cast<std::size_t>(x + radius + k)];
            }
            horiz[static_cast<std::size_t>(y) * geometry.width + static_cast<std::size_t>(x)] = acc;
        }
    }

    TerrainField field;
    field.geometry = geometry;
    field.kind = FeatureKind::Continuous;
    field.values.assign(geometry.cell_count(), 0.0);
    for (int y = 0; y < geometry.height; ++y) {
        for (int x = 0; x < geometry.width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += taps[static_cast<std::size_t>(k + radius)] *
                       horiz[static_cast<std::size_t>(y + radius + k) * geometry.width + static_cast<std::size_t>(x)];
            }
            field.values[geometry.index(x, y)] = acc;
        }
    }
    rescale_to_unit(field.values);
    return field;
}

TerrainField generate_discrete_field(std::uint64_t seed, const GridGeometry& geometry, int classes,
                                     double correlation_length) {
    if (classes < 2) {
        throw ConfigError("discrete fields need K >= 2 classes");
    }
    TerrainField base = generate_continuous_field(seed, geometry, correlation_length);

    std::vector<double> sorted = base.values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    std::vector<double> thresholds;
    for (int k = 1; k < classes; ++k) {
        thresholds.push_back(sorted[(static_cast<std::size_t>(k) * n) / static_cast<std::size_t>(classes)]);
    }

    TerrainField field;
    field.geometry = geometry;
    field.kind = FeatureKind::Discrete;
    field.classes = classes;
    field.lower = 1.0;
    field.upper = static_cast<double>(classes);
    field.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto above = std::upper_bound(thresholds.begin(), thresholds.end(), base.values[i]) - thresholds.begin();
        field.values[i] = static_cast<double>(1 + above);
    }
    return field;
}

namespace {

struct RawRaster {
    int width = 0;
    int height = 0;
    std::vector<double> values;
};

RawRaster read_pgm(std::ifstream& in, const std::filesystem::path& path) {
    std::string magic;
    in >> magic;
    if (magic != "P5") {
        throw IngestError("not a binary PGM: " + path.string());
    }
    auto next_int = [&]() {
        for (;;) {
            in >> std::ws;
            if (in.peek() == '#') {
                std::string comment;
                std::getline(in, comment);
                continue;
            }
            int v = 0;
            if (!(in >> v)) {
                throw IngestError("malformed PGM header: " + path.string());
            }
            return v;
        }
    };
    RawRaster r;
    r.width = next_int();
    r.height = next_int();
    const int maxval = next_int();
    if (r.width <= 0 || r.height <= 0 || maxval != 255) {
        throw IngestError("unsupported PGM header (need maxval 255): " + path.string());
    }
    in.get();  // single whitespace after maxval
    const std::size_t n = static_cast<std::size_t>(r.width) * static_cast<std::size_t>(r.height);
    std::vector<unsigned char> bytes(n);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw IngestError("truncated PGM pixel data: " + path.string());
    }
    r.values.assign(bytes.begin(), bytes.end());
    return r;
}

RawRaster read_csv(std::ifstream& in, const std::filesystem::path& path) {
    RawRaster r;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        int cols = 0;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                r.values.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t", used) != std::string::npos) {
                    throw IngestError("non-numeric CSV entry '" + cell + "' in " + path.string());
                }
            } catch (const std::logic_error&) {
                throw IngestError("non-numeric CSV entry '" + cell + "' in " + path.string());
            }
            ++cols;
        }
        if (r.height == 0) {
            r.width = cols;
        } else if (cols != r.width) {
            throw IngestError("ragged CSV row " + std::to_string(r.height + 1) + " in " + path.string());
        }
        ++r.height;
    }
    return r;
}

}  // namespace

TerrainField load_raster(const std::filesystem::path& path, FeatureKind kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IngestError("cannot open raster " + path.string());
    }
    const bool is_pgm = in.peek() == 'P';
    RawRaster raw = is_pgm ? read_pgm(in, path) : read_csv(in, path);
    if (raw.width < 2 || raw.height < 2) {
        throw IngestError("raster must be at least 2x2: " + path.string());
    }

    TerrainField field;
    field.geometry = GridGeometry(raw.width, raw.height);
    field.kind = kind;
    if (kind == FeatureKind::Continuous) {
        field.values = std::move(raw.values);
        rescale_to_unit(field.values);
        return field;
    }

    std::map<double, int> ids;
    for (double v : raw.values) {
        ids.emplace(v, 0);
    }
    if (ids.size() > 64) {
        throw IngestError("discrete raster has " + std::to_string(ids.size()) + " distinct values (max 64)");
    }
    if (ids.size() < 2) {
        throw IngestError("discrete raster needs at least 2 distinct values");
    }
    int next = 1;
    for (auto& [value, id] : ids) {
        id = next++;
    }
    field.classes = static_cast<int>(ids.size());
    field.lower = 1.0;
    field.upper = static_cast<double>(field.classes);
    field.values.reserve(raw.values.size());
    for (double v : raw.values) {
        field.values.push_back(static_cast<double>(ids.at(v)));
    }
    return field;
}

std::vector<bool> interest_mask(const TerrainField& field, const InterestSpec& spec) {
    if (kind_of(spec) != field.kind) {
        throw ConfigError("interest spec kind does not match the field kind");
    }
    std::vector<bool> mask(field.values.size());
    if (const auto* c = std::get_if<ContinuousInterest>(&spec)) {
        for (std::size_t i = 0; i < mask.size(); ++i) {
            mask[i] = field.values[i] >= c->threshold;
        }
        return mask;
    }
    const auto& d = std::get<DiscreteInterest>(spec);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        mask[i] = d.classes.count(field.label(i)) > 0;
    }
    return mask;
}

}  // namespace ipp
