#include "ipp/errors.hpp"
#include "ipp/reward_metrics.hpp"
#include "ipp/unified.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace ipp;

namespace {

UncertaintyTrace linear_trace(int budget) {
    UncertaintyTrace t;
    for (int b = 0; b <= budget; ++b) {
        t.push_back({double(b), 1.0 - double(b) / budget});
    }
    return t;
}

}  // namespace

TEST_SUITE("reward_metrics") {

TEST_CASE("weighted reduction skips zero-uncertainty cells") {
    const std::vector<double> h0{2.0, 1.0, 0.0};
    const std::vector<double> h1{1.0, 1.0, 0.0};
    const std::vector<double> p{0.5, 1.0, 1.0};
    CHECK(weighted_reduction(h0, h1, p) == 0.25);
}

TEST_CASE("step reward uses interest before the update") {
    const GridGeometry g(3, 3);
    const auto prior = gp_init(g, {0.3, 1.0}, 0.5, 0.01);
    Measurement m;
    m.samples.push_back({4, 0.9});
    const auto post = gp_fuse(prior, m);
    const InterestSpec spec = ContinuousInterest{0.5, 0.0, 1.0};
    double expected = 0.0;
    for (std::size_t i = 0; i < 9; ++i) {
        expected += (prior.variance(i) - post.variance(i)) / prior.variance(i) * 0.5;
    }
    CHECK(step_reward(prior, post, spec) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("information index") {
    CHECK(ii_metric(linear_trace(100), 100.0) == 50.0);
    CHECK(ii_metric({{0.0, 1.0}, {40.0, 1.0}}, 100.0) == doctest::Approx(0.0));
    // Curve reaches zero at half budget and is held flat afterwards.
    CHECK(ii_metric({{0.0, 1.0}, {50.0, 0.0}}, 100.0) == doctest::Approx(75.0));
}

TEST_CASE("rmse and mll") {
    GaussianMapBelief b;
    b.geometry = GridGeometry(2, 2);
    b.mean = Eigen::Vector4d(0.1, 0.2, 0.3, 0.4);
    b.covariance = Eigen::Matrix4d::Identity();
    TerrainField f;
    f.geometry = b.geometry;
    f.values = {0.1, 0.2, 0.3, 0.4};
    const std::vector<bool> mask(4, true);
    CHECK(rmse_metric(b, f, mask) == 0.0);
    CHECK(mll_metric(b, f, mask) == doctest::Approx(91.894).epsilon(1e-5));
    f.values = {0.1, 0.2, 0.3, 0.6};
    const std::vector<bool> last{false, false, false, true};
    CHECK(rmse_metric(b, f, last) == doctest::Approx(20.0));
    CHECK_THROWS_AS((void)rmse_metric(b, f, std::vector<bool>(4, false)), MetricError);
}

TEST_CASE("classification scores match the confusion-table oracle") {
    const GridGeometry g(3, 3);
    TerrainField f;
    f.geometry = g;
    f.kind = FeatureKind::Discrete;
    f.classes = 3;
    f.values = {1, 1, 2, 2, 3, 3, 1, 2, 3};
    const std::vector<int> pred{1, 2, 2, 2, 3, 1, 1, 3, 3};
    auto b = occ_init(g, 3, {0.01, 0.99});
    for (std::size_t i = 0; i < 9; ++i) {
        b.probs.row(static_cast<Eigen::Index>(i)).setConstant(0.1);
        b.probs(static_cast<Eigen::Index>(i), pred[i] - 1) = 0.8;
    }
    const std::vector<bool> mask(9, true);
    const auto got = classification_metrics(b, f, mask);
    std::vector<int> truth;
    for (double v : f.values) {
        truth.push_back(static_cast<int>(v));
    }
    const auto want = oracle::confusion_table_scores(truth, pred, 3);
    CHECK(std::abs(got.miou - want.miou) < 1e-12);
    CHECK(std::abs(got.f1 - want.f1) < 1e-12);
    // Hand count: every class has tp = 2, fp = 1, fn = 1.
    CHECK(got.miou == doctest::Approx(50.0));
    CHECK(got.f1 == doctest::Approx(200.0 / 3.0));
}

TEST_CASE("unc metric over the interest mask") {
    const GridGeometry g(3, 3);
    const MapBelief prior = gp_init(g, {0.3, 1.0}, 0.5, 0.01);
    const MapBelief post = gp_fuse(std::get<GaussianMapBelief>(prior), Measurement{{{0, 0.5}}, 1});
    std::vector<bool> mask(9, false);
    mask[8] = true;
    const auto& pg = std::get<GaussianMapBelief>(post);
    CHECK(unc_metric(post, prior, mask) == doctest::Approx(100.0 * pg.variance(8) / (1.0 + kGramJitter)));
    CHECK(unc_metric(prior, prior, mask) == 100.0);
    CHECK_THROWS_AS((void)unc_metric(post, prior, std::vector<bool>(9, false)), MetricError);
}

}
