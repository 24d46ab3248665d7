#pragma once

#include <string>
#include <vector>

#include "covsteer/moment_table.hpp"
#include "covsteer/steering_problem.hpp"

namespace covsteer {

// Exact forward propagation of the triangular moment hierarchy under a fixed
// affine policy. No closure approximation: the recursions consume order l+1
// entries at time t to produce order l entries at t+1, so storing orders up to
// N-t at time t is exactly sufficient. With n_p parameters the lattice holds
// C(n_p+l-1, l) indices per order, which is the scalability limit.
//
// All functions are pure; concurrent calls on shared immutable inputs are safe
// and results do not depend on call interleaving.

// Table at t = 0 with orders 0..N+extra_orders populated from (mu0, sigma0)
// and the parameter moments. Throws "invalid initial covariance" when sigma0
// is asymmetric beyond 1e-12 or has an eigenvalue below -1e-10.
MomentTable init_table(const SteeringProblem& problem, int extra_orders = 0);

// One transition of the mean block: entries of order 0..target_max_order at
// time table.time + 1. Requires table entries one order deeper.
std::map<MultiIndex, Eigen::VectorXd> step_mean(const MomentTable& table,
                                                const Eigen::MatrixXd& gain,
                                                const Eigen::VectorXd& feedforward,
                                                const SteeringProblem& problem,
                                                int target_max_order);

// One transition of both covariance families; same-index blocks are mirrored
// to exact symmetry after an asymmetry alarm at 1e-9.
void step_cov(const MomentTable& table, const Eigen::MatrixXd& gain,
              const Eigen::VectorXd& feedforward, const SteeringProblem& problem,
              int target_max_order, std::map<IndexPair, Eigen::MatrixXd>& cov_xx_out,
              std::map<IndexPair, Eigen::VectorXd>& cov_xp_out);

// Full triangular propagation: returns tables for t = 0..N, where the table
// at time t holds orders 0..N-t (plus extra_orders, when the caller needs
// parameter-coupled moments at late times, e.g. Cov(x_N, p) for validation).
// The terminal table exposes the steering quantities E[x_N] and Cov(x_N, x_N).
std::vector<MomentTable> propagate(const SteeringProblem& problem, const Policy& policy,
                                   int extra_orders = 0);

// Expected cost (13a) of a policy evaluated on its exact moment trajectory:
// sum_k mu'Q mu + (v+L mu)'R(v+L mu) + tr(Sigma Q) + tr(L Sigma L' R).
double exact_cost(const SteeringProblem& problem, const Policy& policy,
                  const std::vector<MomentTable>& tables);

// Debug serialization of a table sequence (keys: time, multi-index as sorted
// int list, row-major matrix values).
std::string tables_to_json(const std::vector<MomentTable>& tables);

}  // namespace covsteer
