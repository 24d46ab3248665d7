#pragma once

#include <Eigen/Dense>
#include <map>
#include <utility>
#include <vector>

#include "covsteer/multi_index.hpp"

namespace covsteer {

using IndexPair = std::pair<MultiIndex, MultiIndex>;

// Affine state feedback u_k = L_k x_k + v_k, k = 0..N-1.
struct Policy {
    std::vector<Eigen::MatrixXd> gains;          // L_k, n_u x n_x
    std::vector<Eigen::VectorXd> feedforwards;   // v_k, n_u

    int length() const { return static_cast<int>(gains.size()); }
    void validate(int n_x, int n_u, int horizon) const;

    static Policy zero(int n_x, int n_u, int horizon);
};

// Mixed moments of the state/parameter products at one time step:
//   mean[mi]        = E[x_t prod(p over mi)]                       (n_x vector)
//   cov_xx[{a, b}]  = Cov(x_t prod(a), x_t prod(b))                (n_x x n_x)
//   cov_xp[{a, b}]  = Cov(x_t prod(a), prod(b))                    (n_x vector)
//
// Storage is canonical: cov_xx keeps a <= b only (the swap is the transpose),
// cov_xp keeps b nonempty (covariance against a constant is zero). Entries
// exist exactly for orders <= max_order; under horizon N at time t the engine
// fills max_order = N - t.
struct MomentTable {
    int time = 0;
    int max_order = 0;
    std::map<MultiIndex, Eigen::VectorXd> mean;
    std::map<IndexPair, Eigen::MatrixXd> cov_xx;
    std::map<IndexPair, Eigen::VectorXd> cov_xp;

    const Eigen::VectorXd& mean_of(const MultiIndex& mi) const;
    // Cov(x prod(a), x prod(b)) for any order of the pair.
    Eigen::MatrixXd xx(const MultiIndex& a, const MultiIndex& b) const;
    // Cov(x prod(a), prod(b)); zero when b is empty.
    Eigen::VectorXd xp(const MultiIndex& a, const MultiIndex& b) const;
};

}  // namespace covsteer
