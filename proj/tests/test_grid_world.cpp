#include "ipp/errors.hpp"
#include "ipp/grid_world.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>

using namespace ipp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "ipp_unit";
    fs::create_directories(dir);
    return dir / name;
}

// Mean correlation between horizontally adjacent cells.
double lag_one_correlation(const TerrainField& f) {
    const auto& g = f.geometry;
    const double mean = std::accumulate(f.values.begin(), f.values.end(), 0.0) / f.values.size();
    double num = 0.0;
    double den = 0.0;
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            const double a = f.at(x, y) - mean;
            den += a * a;
            if (x + 1 < g.width) {
                num += a * (f.at(x + 1, y) - mean);
            }
        }
    }
    return num / den * g.width / (g.width - 1);
}

}  // namespace

TEST_SUITE("grid_world") {

TEST_CASE("geometry indexing and cell centres") {
    const GridGeometry g(4, 2);
    CHECK(g.cell_count() == 8);
    CHECK(g.cell_size() == doctest::Approx(0.25));
    CHECK(g.index(1, 1) == 5);
    CHECK(g.col(5) == 1);
    CHECK(g.row(5) == 1);
    const auto c = g.center(g.index(1, 0));
    CHECK(c.x == doctest::Approx(0.375));
    CHECK(c.y == doctest::Approx(0.125));
    CHECK_THROWS_AS(GridGeometry(1, 5), ConfigError);
}

TEST_CASE("continuous field spans exactly [0, 1] and is seed-deterministic") {
    const GridGeometry g(20, 20);
    const auto a = generate_continuous_field(11, g, 0.15);
    const auto b = generate_continuous_field(11, g, 0.15);
    const auto c = generate_continuous_field(12, g, 0.15);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    CHECK(*std::min_element(a.values.begin(), a.values.end()) == 0.0);
    CHECK(*std::max_element(a.values.begin(), a.values.end()) == 1.0);
    CHECK(a.kind == FeatureKind::Continuous);
}

TEST_CASE("longer correlation length gives smoother fields") {
    const GridGeometry g(25, 25);
    double smooth = 0.0;
    double rough = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        smooth += lag_one_correlation(generate_continuous_field(s, g, 0.3));
        rough += lag_one_correlation(generate_continuous_field(s, g, 0.05));
    }
    smooth /= 20.0;
    rough /= 20.0;
    CHECK(smooth > 0.9);
    CHECK(rough < smooth - 0.1);
}

TEST_CASE("two-class field splits cells at the median") {
    const GridGeometry g(25, 25);
    const auto f = generate_discrete_field(5, g, 2, 0.15);
    const auto ones = std::count_if(f.values.begin(), f.values.end(), [](double v) { return v == 1.0; });
    const auto twos = std::count_if(f.values.begin(), f.values.end(), [](double v) { return v == 2.0; });
    CHECK(ones == 312);
    CHECK(twos == 313);
    CHECK(f.classes == 2);
}

TEST_CASE("csv raster rescales continuous values") {
    const auto p = scratch("r.csv");
    std::ofstream(p) << "0,5,10\n10,5,0\n";
    const auto f = load_raster(p, FeatureKind::Continuous);
    CHECK(f.geometry == GridGeometry(3, 2));
    CHECK(f.values == std::vector<double>{0.0, 0.5, 1.0, 1.0, 0.5, 0.0});
}

TEST_CASE("csv raster enumerates discrete classes in ascending order") {
    const auto p = scratch("d.csv");
    std::ofstream(p) << "7,3\n3,9\n";
    const auto f = load_raster(p, FeatureKind::Discrete);
    CHECK(f.classes == 3);
    CHECK(f.values == std::vector<double>{2.0, 1.0, 1.0, 3.0});
}

TEST_CASE("malformed rasters are rejected") {
    const auto ragged = scratch("ragged.csv");
    std::ofstream(ragged) << "1,2,3\n4,5\n";
    CHECK_THROWS_AS((void)load_raster(ragged, FeatureKind::Continuous), IngestError);
    const auto text = scratch("text.csv");
    std::ofstream(text) << "1,x\n2,3\n";
    CHECK_THROWS_AS((void)load_raster(text, FeatureKind::Continuous), IngestError);
    CHECK_THROWS_AS((void)load_raster(scratch("missing.csv"), FeatureKind::Continuous), IngestError);
}

TEST_CASE("binary PGM raster") {
    const auto p = scratch("r.pgm");
    {
        std::ofstream out(p, std::ios::binary);
        out << "P5\n2 2\n255\n";
        const unsigned char px[4] = {0, 51, 204, 255};
        out.write(reinterpret_cast<const char*>(px), 4);
    }
    const auto f = load_raster(p, FeatureKind::Continuous);
    CHECK(f.geometry == GridGeometry(2, 2));
    CHECK(f.values[1] == doctest::Approx(0.2));
    CHECK(f.values[3] == 1.0);
}

TEST_CASE("interest masks") {
    TerrainField f;
    f.geometry = GridGeometry(2, 2);
    f.values = {0.1, 0.4, 0.39, 0.9};
    CHECK(interest_mask(f, ContinuousInterest{0.4, 0.0, 1.0}) == std::vector<bool>{false, true, false, true});
    TerrainField d;
    d.geometry = GridGeometry(2, 2);
    d.kind = FeatureKind::Discrete;
    d.classes = 3;
    d.values = {1, 2, 3, 2};
    CHECK(interest_mask(d, DiscreteInterest{{2}, 3}) == std::vector<bool>{false, true, false, true});
    CHECK(is_exploration(DiscreteInterest{{1, 2, 3}, 3}));
    CHECK(is_exploration(ContinuousInterest{0.0, 0.0, 1.0}));
    CHECK_THROWS_AS(validate(DiscreteInterest{{4}, 3}), ConfigError);
}

}
