#include "ipp/errors.hpp"
#include "ipp/unified.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace ipp;

TEST_SUITE("unified") {

TEST_CASE("Gaussian interest probability against numeric integration") {
    const double cases[][3] = {{0.5, 0.1, 0.4}, {0.2, 0.5, 0.9}, {0.9, 0.01, 0.1}, {0.4, 1.0, 0.4}};
    for (const auto& c : cases) {
        const double p = interest_probability(c[0], c[1], ContinuousInterest{c[2], 0.0, 1.0});
        CHECK(std::abs(p - oracle::gaussian_mass_above(c[0], c[1], c[2])) < 1e-10);
    }
    CHECK(interest_probability(0.4, 0.2, ContinuousInterest{0.4, 0.0, 1.0}) == doctest::Approx(0.5));
}

TEST_CASE("Gaussian interest limits") {
    CHECK(interest_probability(-3.0, 0.1, ContinuousInterest{0.0, 0.0, 1.0}) == 1.0);
    CHECK(interest_probability(0.5, 0.0, ContinuousInterest{0.4, 0.0, 1.0}) == 1.0);
    CHECK(interest_probability(0.3, 1e-13, ContinuousInterest{0.4, 0.0, 1.0}) == 0.0);
    CHECK(normal_upper_tail(0.0) == 0.5);
}

TEST_CASE("occupancy interest sums class probabilities") {
    auto o = occ_init(GridGeometry(2, 2), 3, {0.01, 0.99});
    o.probs.row(1) << 0.2, 0.5, 0.3;
    const MapBelief b = o;
    CHECK(interest_probability(b, DiscreteInterest{{2, 3}, 3}, 1) == doctest::Approx(0.8));
    CHECK(interest_probability(b, DiscreteInterest{{1, 2, 3}, 3}, 1) == 1.0);
}

TEST_CASE("state raster round trip") {
    const MapBelief b = gp_init(GridGeometry(4, 3), {0.3, 1.0}, 0.5, 0.01);
    const InterestSpec spec = ContinuousInterest{0.6, 0.0, 1.0};
    const auto s = assemble_state(b, spec, {2, 1}, 37.0, Hyperparams{spec, 0.3});
    const auto path = std::filesystem::temp_directory_path() / "ipp_state.csv";
    export_state_raster(s, path);
    const auto r = read_state_raster(path);
    CHECK(r.geometry == s.geometry);
    CHECK(r.interest == s.interest);
    CHECK(r.uncertainty == s.uncertainty);
    CHECK(r.pose == s.pose);
    CHECK(r.remaining_budget == 37.0);
    CHECK(r.threshold == 0.6);
    CHECK(r.lengthscale_encoding == 0.3);
}

TEST_CASE("discrete state raster writes nan threshold") {
    const MapBelief b = occ_init(GridGeometry(2, 2), 3, {0.01, 0.99});
    const InterestSpec spec = DiscreteInterest{{1}, 3};
    const auto s = assemble_state(b, spec, {0, 0}, 5.0, Hyperparams{spec, 0.0});
    const auto path = std::filesystem::temp_directory_path() / "ipp_state_d.csv";
    export_state_raster(s, path);
    CHECK(std::isnan(read_state_raster(path).threshold));
    CHECK(s.interest[0] == doctest::Approx(1.0 / 3.0));
}

}
