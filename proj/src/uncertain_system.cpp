#include "covsteer/uncertain_system.hpp"

#include <stdexcept>

namespace covsteer {

void UncertainSystem::validate() const {
    if (a_bar.rows() == 0 || a_bar.rows() != a_bar.cols())
        throw std::invalid_argument("system: a_bar must be square and nonempty");
    if (b_bar.rows() != a_bar.rows())
        throw std::invalid_argument("system: b_bar row count must equal n_x");
    if (d_bar.rows() != a_bar.rows())
        throw std::invalid_argument("system: d_bar row count must equal n_x");
    const auto np = a_tilde.size();
    if (b_tilde.size() != np || d_tilde.size() != np)
        throw std::invalid_argument("system: perturbation lists must all have length n_p");
    for (std::size_t j = 0; j < np; ++j) {
        if (a_tilde[j].rows() != a_bar.rows() || a_tilde[j].cols() != a_bar.cols())
            throw std::invalid_argument("system: a_tilde shape mismatch");
        if (b_tilde[j].rows() != b_bar.rows() || b_tilde[j].cols() != b_bar.cols())
            throw std::invalid_argument("system: b_tilde shape mismatch");
        if (d_tilde[j].rows() != d_bar.rows() || d_tilde[j].cols() != d_bar.cols())
            throw std::invalid_argument("system: d_tilde shape mismatch");
    }
}

UncertainSystem UncertainSystem::nominal_only(Eigen::MatrixXd a, Eigen::MatrixXd b,
                                              Eigen::MatrixXd d, int n_p) {
    UncertainSystem sys;
    sys.a_bar = std::move(a);
    sys.b_bar = std::move(b);
    sys.d_bar = std::move(d);
    for (int j = 0; j < n_p; ++j) {
        sys.a_tilde.push_back(Eigen::MatrixXd::Zero(sys.a_bar.rows(), sys.a_bar.cols()));
        sys.b_tilde.push_back(Eigen::MatrixXd::Zero(sys.b_bar.rows(), sys.b_bar.cols()));
        sys.d_tilde.push_back(Eigen::MatrixXd::Zero(sys.d_bar.rows(), sys.d_bar.cols()));
    }
    sys.validate();
    return sys;
}

}  // namespace covsteer
