#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "covsteer/distributions.hpp"

using namespace covsteer;

TEST_CASE("raw moments of the closed-form kinds") {
    auto g = ParameterDistribution::gaussian(1.0);
    CHECK(g.raw_moment(0) == doctest::Approx(1.0));
    CHECK(g.raw_moment(1) == 0.0);
    CHECK(g.raw_moment(4) == doctest::Approx(3.0));
    CHECK(g.raw_moment(6) == doctest::Approx(15.0));

    auto g_half = ParameterDistribution::gaussian(0.5);
    CHECK(g_half.raw_moment(2) == doctest::Approx(0.25));

    auto u = ParameterDistribution::uniform(-1.0, 1.0);
    CHECK(u.raw_moment(2) == doctest::Approx(1.0 / 3.0));
    CHECK(u.raw_moment(3) == 0.0);
    CHECK(u.raw_moment(4) == doctest::Approx(1.0 / 5.0));

    auto t = ParameterDistribution::two_point(1.0);
    CHECK(t.raw_moment(6) == doctest::Approx(1.0));
    CHECK(t.raw_moment(3) == 0.0);
}

TEST_CASE("explicit tables serve stored orders and reject deeper queries") {
    auto d = ParameterDistribution::explicit_moments({1.0, 0.0, 0.5, 0.0, 0.4});
    CHECK(d.raw_moment(2) == doctest::Approx(0.5));
    CHECK(d.raw_moment(4) == doctest::Approx(0.4));
    CHECK_THROWS_WITH_AS(d.raw_moment(5), "moment order unavailable", std::out_of_range);
    CHECK_FALSE(d.samplable());
}

TEST_CASE("construction rejects non-zero-mean inputs") {
    CHECK_THROWS_AS(ParameterDistribution::uniform(-1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(ParameterDistribution::uniform(0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ParameterDistribution::explicit_moments({1.0, 0.1}), std::invalid_argument);
    CHECK_THROWS_AS(ParameterDistribution::explicit_moments({0.9, 0.0}), std::invalid_argument);
}

TEST_CASE("joint moments factor over independent parameters") {
    std::vector<ParameterDistribution> dists = {ParameterDistribution::gaussian(0.5),
                                                ParameterDistribution::uniform(-1.0, 1.0)};
    CHECK(joint_moment(dists, MultiIndex{}) == doctest::Approx(1.0));
    CHECK(joint_moment(dists, MultiIndex{0, 0}) == doctest::Approx(0.25));
    CHECK(joint_moment(dists, MultiIndex{0, 1}) == doctest::Approx(0.0));
    CHECK(joint_moment(dists, MultiIndex{0, 0, 1, 1}) == doctest::Approx(0.25 / 3.0));
}

TEST_CASE("parameter covariances") {
    std::vector<ParameterDistribution> two = {ParameterDistribution::two_point(1.0)};
    CHECK(param_cov(two, MultiIndex{0}, MultiIndex{0}) == doctest::Approx(1.0));
    CHECK(param_cov(two, MultiIndex{0}, MultiIndex{}) == doctest::Approx(0.0));

    std::vector<ParameterDistribution> gauss = {ParameterDistribution::gaussian(1.0)};
    CHECK(param_cov(gauss, MultiIndex{0}, MultiIndex{0, 0}) == doctest::Approx(0.0));
}

TEST_CASE("property: joint moment is permutation invariant and odd orders vanish") {
    std::mt19937_64 rng(7);
    std::vector<ParameterDistribution> dists = {ParameterDistribution::gaussian(0.7),
                                                ParameterDistribution::uniform(-2.0, 2.0),
                                                ParameterDistribution::two_point(0.5)};
    std::uniform_int_distribution<int> pick(0, 2);
    std::uniform_int_distribution<int> len(0, 6);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<int> raw(len(rng));
        for (auto& j : raw) j = pick(rng);
        std::vector<int> shuffled = raw;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const double a = joint_moment(dists, MultiIndex(raw));
        const double b = joint_moment(dists, MultiIndex(shuffled));
        CHECK(a == doctest::Approx(b).epsilon(1e-14));

        // Odd total multiplicity of any symmetric parameter kills the product.
        MultiIndex mi(raw);
        bool any_odd = false;
        for (int j = 0; j <= 2; ++j) any_odd |= (mi.multiplicity(j) % 2 == 1);
        if (any_odd) CHECK(a == 0.0);
    }
}

TEST_CASE("property: param_cov of an index with itself is a variance") {
    std::mt19937_64 rng(11);
    std::vector<ParameterDistribution> dists = {ParameterDistribution::gaussian(0.9),
                                                ParameterDistribution::uniform(-1.5, 1.5)};
    std::uniform_int_distribution<int> pick(0, 1);
    std::uniform_int_distribution<int> len(0, 5);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<int> raw(len(rng));
        for (auto& j : raw) j = pick(rng);
        MultiIndex mi(raw);
        CHECK(param_cov(dists, mi, mi) >= -1e-12);
    }
}

TEST_CASE("sampling is deterministic per seed and moment-consistent") {
    auto u = ParameterDistribution::uniform(-1.0, 1.0);
    std::mt19937_64 a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(u.sample(a) == u.sample(b));

    // Rough law-of-large-numbers sanity on the second moment.
    std::mt19937_64 rng(123);
    double sum_sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double s = u.sample(rng);
        CHECK(s >= -1.0);
        CHECK(s < 1.0);
        sum_sq += s * s;
    }
    CHECK(sum_sq / n == doctest::Approx(1.0 / 3.0).epsilon(0.02));
}

TEST_CASE("multi-index canonicalization") {
    MultiIndex mi{2, 0, 1, 0};
    CHECK(mi.order() == 4);
    CHECK(mi.indices() == std::vector<int>{0, 0, 1, 2});
    CHECK(mi.multiplicity(0) == 2);
    CHECK(mi.plus(1).indices() == std::vector<int>{0, 0, 1, 1, 2});
    CHECK(mi.merged(MultiIndex{0, 2}).indices() == std::vector<int>{0, 0, 0, 1, 2, 2});

    CHECK(multi_indices_of_order(2, 2).size() == 3);   // C(2+2-1, 2)
    CHECK(multi_indices_up_to(3, 2).size() == 1 + 3 + 6);
}
