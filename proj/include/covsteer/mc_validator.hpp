#pragma once

#include <cstdint>
#include <vector>

#include "covsteer/moment_engine.hpp"

namespace covsteer {

// Closed-loop Monte-Carlo batch statistics. Results are a deterministic
// function of (seed, n_samples): every sample draws from its own
// counter-seeded generator, so internal partitioning cannot change them.
struct SimulationBatch {
    int n_samples = 0;
    std::uint64_t seed = 0;

    // Per time step t = 0..N.
    std::vector<Eigen::VectorXd> mean;            // empirical E[x_t]
    std::vector<Eigen::MatrixXd> covariance;      // empirical Cov(x_t) (unbiased)
    std::vector<Eigen::MatrixXd> xp_mean;         // empirical E[x_t p_j], n_x x n_p
    std::vector<Eigen::VectorXd> mean_se;         // standard errors of mean entries
    std::vector<Eigen::MatrixXd> covariance_se;   // standard errors of cov entries
    std::vector<Eigen::MatrixXd> xp_mean_se;      // standard errors of E[x_t p_j]

    // Empirical Pr(alpha' y > beta), indexed [constraint][k], k = 0..N-1.
    std::vector<std::vector<double>> state_violation_rate;
    std::vector<std::vector<double>> input_violation_rate;
    // Binomial standard errors for the rates above.
    std::vector<std::vector<double>> state_violation_se;
    std::vector<std::vector<double>> input_violation_se;

    // First min(n_samples, 1000) trajectories, each n_x x (N+1), for dumps.
    std::vector<Eigen::MatrixXd> kept_trajectories;
};

// Simulates the closed loop u = L x + v: x0 ~ (mu0, sigma0) Gaussian via a
// symmetric PSD square root, one constant parameter draw per sample, i.i.d.
// noise per step. Throws when any required distribution is not samplable.
SimulationBatch simulate(const SteeringProblem& problem, const Policy& policy,
                         int n_samples, std::uint64_t seed);

// Exact moments for finite-support inputs; the independent ground truth the
// recursion engine is validated against.
struct EnumerationResult {
    std::vector<MomentTable> tables;
    // Raw (uncentered) second moments E[(x_t prod a)(x_t prod b)'] per time,
    // for consistency checks against the derived covariances.
    std::vector<std::map<IndexPair, Eigen::MatrixXd>> raw_xx;
};

// Iterates all 2^(n_p + N*n_w) equiprobable outcomes of two-point parameters
// and two-point noise from a deterministic x0 (sigma0 = 0), propagates the
// closed loop exactly, and returns every lattice moment by direct expectation.
// The outcome budget is capped at 2^24.
EnumerationResult enumerate_exact(const SteeringProblem& problem, const Policy& policy,
                                  int extra_orders = 0);

}  // namespace covsteer
