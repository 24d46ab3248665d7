#pragma once

#include <Eigen/Dense>
#include <vector>

namespace covsteer {

// Linear system x_{k+1} = A x_k + B u_k + D w_k whose matrices carry a known
// nominal part and a random time-invariant part:
//   A = a_bar + sum_j a_tilde[j] p_j   (same for B, D).
struct UncertainSystem {
    Eigen::MatrixXd a_bar;  // n_x x n_x
    Eigen::MatrixXd b_bar;  // n_x x n_u
    Eigen::MatrixXd d_bar;  // n_x x n_w
    std::vector<Eigen::MatrixXd> a_tilde;  // n_p entries, each n_x x n_x
    std::vector<Eigen::MatrixXd> b_tilde;  // n_p entries, each n_x x n_u
    std::vector<Eigen::MatrixXd> d_tilde;  // n_p entries, each n_x x n_w

    int n_x() const { return static_cast<int>(a_bar.rows()); }
    int n_u() const { return static_cast<int>(b_bar.cols()); }
    int n_w() const { return static_cast<int>(d_bar.cols()); }
    int n_p() const { return static_cast<int>(a_tilde.size()); }

    // Throws std::invalid_argument when the perturbation lists disagree in
    // length or any matrix shape differs from its nominal counterpart.
    void validate() const;

    // System with zero perturbation matrices (n_p entries of zeros).
    static UncertainSystem nominal_only(Eigen::MatrixXd a, Eigen::MatrixXd b,
                                        Eigen::MatrixXd d, int n_p = 0);
};

}  // namespace covsteer
