#include "ipp/belief_maps.hpp"
#include "ipp/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace ipp;

TEST_SUITE("belief_maps") {

TEST_CASE("Matern-3/2 value at one lengthscale") {
    const MaternKernel k{0.35, 1.0};
    CHECK(kernel_eval({0.0, 0.0}, {0.35, 0.0}, k) == doctest::Approx(0.4833577245965077).epsilon(1e-12));
    CHECK(kernel_eval({0.2, 0.2}, {0.2, 0.2}, k) == 1.0);
}

TEST_CASE("prior covariance equals the brute-force Gram matrix") {
    const GridGeometry g(6, 4);
    const MaternKernel k{0.25, 0.7};
    const auto b = gp_init(g, k, 0.5, 0.01);
    CHECK((b.covariance - oracle::brute_gram(g, k)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(b.mean.isConstant(0.5));
}

TEST_CASE("sequential fusion equals batch regression in any order") {
    const GridGeometry g(7, 7);
    const MaternKernel k{0.3, 1.0};
    const auto prior = gp_init(g, k, 0.5, 0.02);
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::size_t> cell(0, g.cell_count() - 1);
    std::normal_distribution<double> z(0.5, 0.3);
    std::vector<Sample> samples;
    for (int i = 0; i < 25; ++i) {
        samples.push_back({cell(rng), z(rng)});
    }
    const auto oracle_post = oracle::batch_gp(oracle::brute_gram(g, k), 0.5, 0.02, samples);

    auto fuse_all = [&](std::vector<Sample> order) {
        GaussianMapBelief b = prior;
        for (const auto& s : order) {
            gp_fuse_in_place(b, Measurement{{s}, 0});
        }
        return b;
    };
    const auto forward = fuse_all(samples);
    auto shuffled = samples;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto other = fuse_all(shuffled);
    const auto batch = gp_fuse(prior, Measurement{samples, 0});

    for (const auto* b : {&forward, &other, &batch}) {
        CHECK((b->mean - oracle_post.mean).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((b->covariance - oracle_post.covariance).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("fusing an empty measurement is a no-op") {
    const auto prior = gp_init(GridGeometry(3, 3), {}, 0.5, 0.01);
    const auto post = gp_fuse(prior, Measurement{});
    CHECK(post.covariance == prior.covariance);
}

TEST_CASE("occupancy Bayes update with the 0.8 confusion matrix") {
    auto b = occ_init(GridGeometry(2, 2), 3, {0.01, 0.99});
    CHECK(b.probs.row(0).isConstant(1.0 / 3.0));
    const auto cm = ConfusionMatrix::uniform_noise(3, 0.8);
    occ_fuse_in_place(b, Measurement{{{0, 1.0}}, 1}, cm);
    CHECK(b.probs(0, 0) == doctest::Approx(0.8));
    CHECK(b.probs(0, 1) == doctest::Approx(0.1));
    CHECK(b.probs(1, 0) == doctest::Approx(1.0 / 3.0));
    occ_fuse_in_place(b, Measurement{{{0, 1.0}}, 2}, cm);
    // 0.8 * 0.8 / (0.64 + 0.01 + 0.01)
    CHECK(b.probs(0, 0) == doctest::Approx(0.64 / 0.66));
}

TEST_CASE("bounded renormalisation") {
    Eigen::RowVectorXd p(3);
    p << 0.0001, 0.9998, 0.0001;
    clamp_distribution(p, 0.005, 0.99);
    CHECK(p(0) == doctest::Approx(0.005));
    CHECK(p(1) == doctest::Approx(0.99));
    CHECK(p(2) == doctest::Approx(0.005));
    CHECK(p.sum() == doctest::Approx(1.0));

    Eigen::RowVectorXd q(4);
    q << 0.001, 0.5, 0.3, 0.199;
    clamp_distribution(q, 0.01, 0.99);
    CHECK(q(0) == doctest::Approx(0.01));
    CHECK(q.sum() == doctest::Approx(1.0));
    CHECK(q(1) / q(2) == doctest::Approx(0.5 / 0.3));
}

TEST_CASE("effective floor when bounds conflict") {
    const auto b = occ_init(GridGeometry(2, 2), 3, {0.01, 0.99});
    CHECK(b.effective_floor() == doctest::Approx(0.005));
    CHECK_THROWS_AS((void)occ_init(GridGeometry(2, 2), 3, {0.4, 0.99}), ConfigError);
}

TEST_CASE("uncertainty variants") {
    const MapBelief occ = occ_init(GridGeometry(2, 2), 4, {0.01, 0.99});
    CHECK(cell_uncertainty(occ, 0, UncertaintyVariant::StateSpace) == doctest::Approx(std::log(4.0)));
    CHECK(cell_uncertainty(occ, 0, UncertaintyVariant::Reward) == doctest::Approx(4.0));
    const MapBelief gp = gp_init(GridGeometry(2, 2), {0.35, 2.0}, 0.0, 0.01);
    CHECK(cell_uncertainty(gp, 3, UncertaintyVariant::StateSpace) == doctest::Approx(2.0));
    CHECK(cell_uncertainty(gp, 3, UncertaintyVariant::Reward) == doctest::Approx(2.0));
}

}
