#pragma once

#include <Eigen/Dense>
#include <vector>

#include "covsteer/distributions.hpp"
#include "covsteer/settings.hpp"
#include "covsteer/uncertain_system.hpp"

namespace covsteer {

// Pr(alpha' y <= beta) >= 1 - delta, imposed at k = 0..N-1.
struct ChanceConstraint {
    Eigen::VectorXd alpha;
    double beta = 0.0;
    double delta = 0.1;

    // sqrt((1 - delta) / delta)
    double cantelli_factor() const;
};

// Full covariance steering instance: system, disturbance laws, horizon,
// boundary moments, cost weights, chance constraints and solve settings.
struct SteeringProblem {
    UncertainSystem system;
    std::vector<ParameterDistribution> param_dists;  // one per p_j
    std::vector<ParameterDistribution> noise_dists;  // one per w channel, unit variance

    int horizon = 0;  // N
    Eigen::VectorXd mu0;
    Eigen::MatrixXd sigma0;
    Eigen::VectorXd mu_final;
    Eigen::MatrixXd sigma_final;

    Eigen::MatrixXd Q;  // state weight, PSD
    Eigen::MatrixXd R;  // input weight, PD

    std::vector<ChanceConstraint> state_constraints;
    std::vector<ChanceConstraint> input_constraints;

    ScpSettings scp;
    SolverSettings solver;

    // Dimension consistency, Q >= 0, R > 0, unit-variance noise channels,
    // delta in (0,1), and explicit moment tables deep enough for the horizon
    // (order 2N+2). Throws std::invalid_argument naming the offending block.
    void validate() const;
};

}  // namespace covsteer
