#pragma once

#include <random>

#include "covsteer/steering_problem.hpp"
#include "covsteer/moment_table.hpp"

namespace covsteer::testing {

// Canonical scalar fixture: x_{t+1} = (1 + p) x_t + w_t with p, w two-point
// at +-1 and x_0 = 1. Eight outcomes at N = 2; exact values worked in the
// module tests.
inline SteeringProblem scalar_fixture(int horizon = 2) {
    SteeringProblem problem;
    problem.system.a_bar = Eigen::MatrixXd::Constant(1, 1, 1.0);
    problem.system.b_bar = Eigen::MatrixXd::Zero(1, 1);
    problem.system.d_bar = Eigen::MatrixXd::Constant(1, 1, 1.0);
    problem.system.a_tilde = {Eigen::MatrixXd::Constant(1, 1, 1.0)};
    problem.system.b_tilde = {Eigen::MatrixXd::Zero(1, 1)};
    problem.system.d_tilde = {Eigen::MatrixXd::Zero(1, 1)};
    problem.param_dists = {ParameterDistribution::two_point(1.0)};
    problem.noise_dists = {ParameterDistribution::two_point(1.0)};
    problem.horizon = horizon;
    problem.mu0 = Eigen::VectorXd::Constant(1, 1.0);
    problem.sigma0 = Eigen::MatrixXd::Zero(1, 1);
    problem.mu_final = Eigen::VectorXd::Zero(1);
    problem.sigma_final = Eigen::MatrixXd::Identity(1, 1);
    problem.Q = Eigen::MatrixXd::Identity(1, 1);
    problem.R = Eigen::MatrixXd::Identity(1, 1);
    return problem;
}

// Random small system with two-point parameters and noise, deterministic x0;
// suitable for the exhaustive enumeration oracle.
inline SteeringProblem random_two_point_problem(std::mt19937_64& rng, int n_x, int n_u,
                                                int n_w, int n_p, int horizon) {
    std::uniform_real_distribution<double> coef(-0.9, 0.9);
    const auto rand_mat = [&](int r, int c) {
        Eigen::MatrixXd m(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) m(i, j) = coef(rng);
        return m;
    };

    SteeringProblem problem;
    problem.system.a_bar = rand_mat(n_x, n_x);
    problem.system.b_bar = rand_mat(n_x, n_u);
    problem.system.d_bar = rand_mat(n_x, n_w);
    for (int j = 0; j < n_p; ++j) {
        problem.system.a_tilde.push_back(rand_mat(n_x, n_x));
        problem.system.b_tilde.push_back(rand_mat(n_x, n_u));
        problem.system.d_tilde.push_back(rand_mat(n_x, n_w));
        std::uniform_real_distribution<double> mag(0.2, 1.5);
        problem.param_dists.push_back(ParameterDistribution::two_point(mag(rng)));
    }
    for (int i = 0; i < n_w; ++i)
        problem.noise_dists.push_back(ParameterDistribution::two_point(1.0));
    problem.horizon = horizon;
    problem.mu0 = rand_mat(n_x, 1);
    problem.sigma0 = Eigen::MatrixXd::Zero(n_x, n_x);
    problem.mu_final = Eigen::VectorXd::Zero(n_x);
    problem.sigma_final = Eigen::MatrixXd::Identity(n_x, n_x);
    problem.Q = Eigen::MatrixXd::Identity(n_x, n_x);
    problem.R = Eigen::MatrixXd::Identity(n_u, n_u);
    return problem;
}

inline Policy random_policy(std::mt19937_64& rng, int n_x, int n_u, int horizon,
                            double gain_scale = 0.3, double ff_scale = 0.5) {
    std::uniform_real_distribution<double> g(-gain_scale, gain_scale);
    std::uniform_real_distribution<double> f(-ff_scale, ff_scale);
    Policy policy;
    for (int k = 0; k < horizon; ++k) {
        Eigen::MatrixXd gain(n_u, n_x);
        for (int i = 0; i < n_u; ++i)
            for (int j = 0; j < n_x; ++j) gain(i, j) = g(rng);
        Eigen::VectorXd ff(n_u);
        for (int i = 0; i < n_u; ++i) ff(i) = f(rng);
        policy.gains.push_back(gain);
        policy.feedforwards.push_back(ff);
    }
    return policy;
}

}  // namespace covsteer::testing
