#include "covsteer/moment_table.hpp"

#include <stdexcept>

namespace covsteer {

void Policy::validate(int n_x, int n_u, int horizon) const {
    if (static_cast<int>(gains.size()) != horizon ||
        static_cast<int>(feedforwards.size()) != horizon)
        throw std::invalid_argument("policy: gain/feedforward sequences must have length N");
    for (int k = 0; k < horizon; ++k) {
        if (gains[k].rows() != n_u || gains[k].cols() != n_x)
            throw std::invalid_argument("policy: gain shape mismatch");
        if (feedforwards[k].size() != n_u)
            throw std::invalid_argument("policy: feedforward shape mismatch");
    }
}

Policy Policy::zero(int n_x, int n_u, int horizon) {
    Policy p;
    p.gains.assign(horizon, Eigen::MatrixXd::Zero(n_u, n_x));
    p.feedforwards.assign(horizon, Eigen::VectorXd::Zero(n_u));
    return p;
}

const Eigen::VectorXd& MomentTable::mean_of(const MultiIndex& mi) const {
    auto it = mean.find(mi);
    if (it == mean.end()) throw std::logic_error("hierarchy underfilled: missing mean entry");
    return it->second;
}

Eigen::MatrixXd MomentTable::xx(const MultiIndex& a, const MultiIndex& b) const {
    const bool swap = b < a;
    auto it = cov_xx.find(swap ? IndexPair{b, a} : IndexPair{a, b});
    if (it == cov_xx.end()) throw std::logic_error("hierarchy underfilled: missing xx-cov entry");
    return swap ? it->second.transpose() : it->second;
}

Eigen::VectorXd MomentTable::xp(const MultiIndex& a, const MultiIndex& b) const {
    if (b.empty()) {
        auto any = mean.begin();
        if (any == mean.end()) throw std::logic_error("hierarchy underfilled: empty table");
        return Eigen::VectorXd::Zero(any->second.size());
    }
    auto it = cov_xp.find(IndexPair{a, b});
    if (it == cov_xp.end()) throw std::logic_error("hierarchy underfilled: missing xp-cov entry");
    return it->second;
}

}  // namespace covsteer
