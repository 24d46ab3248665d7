#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "covsteer/mc_validator.hpp"
#include "covsteer/moment_engine.hpp"
#include "support/fixtures.hpp"

using namespace covsteer;
using namespace covsteer::testing;

TEST_CASE("enumeration of the canonical scalar fixture") {
    const auto problem = scalar_fixture(2);
    const auto exact = enumerate_exact(problem, Policy::zero(1, 1, 2), 1);
    const MultiIndex none;
    const MultiIndex p{0};
    CHECK(exact.tables[2].mean_of(none)(0) == doctest::Approx(2.0));
    CHECK(exact.tables[2].xx(none, none)(0, 0) == doctest::Approx(7.0));
    CHECK(exact.tables[2].xp(none, p)(0) == doctest::Approx(2.0));
    // Raw second moment E[x2^2] = 11 behind Var(x2) = 7.
    CHECK(exact.raw_xx[2].at({none, none})(0, 0) == doctest::Approx(11.0));
}

TEST_CASE("enumeration with N = 0 returns the initial moments") {
    const auto problem = scalar_fixture(0);
    const auto exact = enumerate_exact(problem, Policy::zero(1, 1, 0));
    const MultiIndex none;
    CHECK(exact.tables.size() == 1);
    CHECK(exact.tables[0].mean_of(none)(0) == doctest::Approx(1.0));
    CHECK(exact.tables[0].xx(none, none)(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("enumeration preconditions") {
    auto problem = scalar_fixture(2);
    problem.sigma0(0, 0) = 0.1;
    CHECK_THROWS_AS(enumerate_exact(problem, Policy::zero(1, 1, 2)), std::invalid_argument);

    problem = scalar_fixture(2);
    problem.param_dists = {ParameterDistribution::gaussian(1.0)};
    CHECK_THROWS_AS(enumerate_exact(problem, Policy::zero(1, 1, 2)), std::invalid_argument);

    problem = scalar_fixture(30);  // 31 draws > 24
    CHECK_THROWS_AS(enumerate_exact(problem, Policy::zero(1, 1, 30)), std::invalid_argument);
}

TEST_CASE("enumeration without parameter dependence equals closed-form LTI") {
    std::mt19937_64 rng(3);
    auto problem = random_two_point_problem(rng, 2, 1, 1, 1, 3);
    problem.system.a_tilde[0].setZero();
    problem.system.b_tilde[0].setZero();
    problem.system.d_tilde[0].setZero();
    auto policy = random_policy(rng, 2, 1, 3);
    const auto exact = enumerate_exact(problem, policy);
    const auto tables = propagate(problem, policy);
    const MultiIndex none;
    for (int t = 0; t <= 3; ++t) {
        CHECK((exact.tables[t].mean_of(none) - tables[t].mean_of(none)).cwiseAbs().maxCoeff() <
              1e-12);
        CHECK((exact.tables[t].xx(none, none) - tables[t].xx(none, none)).cwiseAbs().maxCoeff() <
              1e-12);
    }
}

TEST_CASE("consistency: derived covariances match raw moments from enumeration") {
    std::mt19937_64 rng(13);
    auto problem = random_two_point_problem(rng, 2, 1, 1, 2, 3);
    auto policy = random_policy(rng, 2, 1, 3);
    const auto exact = enumerate_exact(problem, policy);
    for (std::size_t t = 0; t < exact.tables.size(); ++t) {
        for (const auto& [key, raw] : exact.raw_xx[t]) {
            const Eigen::MatrixXd derived =
                raw - exact.tables[t].mean_of(key.first) *
                          exact.tables[t].mean_of(key.second).transpose();
            CHECK((derived - exact.tables[t].xx(key.first, key.second)).cwiseAbs().maxCoeff() <
                  1e-12);
        }
    }
}

TEST_CASE("simulation determinism and degenerate inputs") {
    auto problem = scalar_fixture(2);
    const auto policy = Policy::zero(1, 1, 2);
    const auto a = simulate(problem, policy, 500, 77);
    const auto b = simulate(problem, policy, 500, 77);
    for (int t = 0; t <= 2; ++t) {
        CHECK(a.mean[t] == b.mean[t]);              // bitwise: same seeds, same draws
        CHECK(a.covariance[t] == b.covariance[t]);
    }

    // Zero noise + deterministic start: every sample equals the deterministic path.
    SteeringProblem quiet = scalar_fixture(3);
    quiet.system.d_bar.setZero();
    quiet.system.a_tilde[0].setZero();
    quiet.param_dists = {ParameterDistribution::two_point(0.0)};
    const auto batch = simulate(quiet, Policy::zero(1, 1, 3), 100, 1);
    for (int t = 0; t <= 3; ++t) {
        CHECK(batch.mean[t](0) == doctest::Approx(1.0));
        CHECK(batch.covariance[t](0, 0) == doctest::Approx(0.0));
    }
}

TEST_CASE("simulation recovers engine moments within standard-error bands") {
    std::mt19937_64 rng(23);
    auto problem = random_two_point_problem(rng, 2, 1, 1, 1, 3);
    // Gaussian start so x0 sampling also gets exercised.
    problem.sigma0 = Eigen::MatrixXd::Identity(2, 2) * 0.01;
    auto policy = random_policy(rng, 2, 1, 3);
    const auto tables = propagate(problem, policy, 1);
    const auto batch = simulate(problem, policy, 40000, 999);
    const MultiIndex none;
    const MultiIndex p{0};
    for (int t = 1; t <= 3; ++t) {
        for (int i = 0; i < 2; ++i) {
            CHECK(std::abs(batch.mean[t](i) - tables[t].mean_of(none)(i)) <
                  4.0 * batch.mean_se[t](i) + 1e-10);
            CHECK(std::abs(batch.xp_mean[t](i, 0) - tables[t].mean_of(p)(i)) <
                  4.0 * batch.xp_mean_se[t](i, 0) + 1e-10);
            for (int j = 0; j < 2; ++j)
                CHECK(std::abs(batch.covariance[t](i, j) - tables[t].xx(none, none)(i, j)) <
                      4.0 * batch.covariance_se[t](i, j) + 1e-10);
        }
    }
}

TEST_CASE("violation rates count strict exceedances") {
    auto problem = scalar_fixture(2);
    ChanceConstraint c;
    c.alpha = Eigen::VectorXd::Constant(1, 1.0);
    c.beta = 0.0;  // x0 = 1 > 0 always violated at k = 0
    c.delta = 0.1;
    problem.state_constraints = {c};
    const auto batch = simulate(problem, Policy::zero(1, 1, 2), 1000, 5);
    CHECK(batch.state_violation_rate[0][0] == doctest::Approx(1.0));
}

TEST_CASE("unsamplable kinds are rejected by the simulator") {
    auto problem = scalar_fixture(2);
    problem.param_dists = {ParameterDistribution::explicit_moments({1.0, 0.0, 1.0})};
    CHECK_THROWS_WITH_AS(simulate(problem, Policy::zero(1, 1, 2), 10, 0),
                         "oracle requires a samplable kind", std::runtime_error);
}
