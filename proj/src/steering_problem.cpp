#include "covsteer/steering_problem.hpp"

#include <cmath>
#include <stdexcept>

namespace covsteer {

double ChanceConstraint::cantelli_factor() const {
    return std::sqrt((1.0 - delta) / delta);
}

namespace {

void check_symmetric_psd(const Eigen::MatrixXd& m, const char* name, double psd_floor) {
    if (m.rows() != m.cols()) throw std::invalid_argument(std::string(name) + ": must be square");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument(std::string(name) + ": must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < psd_floor)
        throw std::invalid_argument(std::string(name) + ": must be positive semidefinite");
}

}  // namespace

void SteeringProblem::validate() const {
    system.validate();
    const int nx = system.n_x();
    const int nu = system.n_u();
    const int nw = system.n_w();
    const int np = system.n_p();

    if (horizon < 0) throw std::invalid_argument("horizon: must be nonnegative");
    if (static_cast<int>(param_dists.size()) != np)
        throw std::invalid_argument("param_dists: need one distribution per parameter");
    if (static_cast<int>(noise_dists.size()) != nw)
        throw std::invalid_argument("noise_dists: need one distribution per noise channel");
    for (const auto& d : noise_dists) {
        if (std::abs(d.raw_moment(2) - 1.0) > 1e-12)
            throw std::invalid_argument("noise_dists: channels must have unit variance");
    }
    // The hierarchy queries parameter moments up to order 2N+2; make sure
    // explicit tables reach that far before any propagation starts.
    for (const auto& d : param_dists) {
        if (d.kind() == ParameterDistribution::Kind::ExplicitMoments)
            (void)d.raw_moment(2 * horizon + 2);
    }

    if (mu0.size() != nx) throw std::invalid_argument("mu0: dimension mismatch");
    if (mu_final.size() != nx) throw std::invalid_argument("mu_final: dimension mismatch");
    if (sigma0.rows() != nx || sigma0.cols() != nx)
        throw std::invalid_argument("sigma0: dimension mismatch");
    if (sigma_final.rows() != nx || sigma_final.cols() != nx)
        throw std::invalid_argument("sigma_final: dimension mismatch");
    check_symmetric_psd(sigma0, "sigma0", -1e-10);
    check_symmetric_psd(sigma_final, "sigma_final", -1e-10);

    if (Q.rows() != nx || Q.cols() != nx) throw std::invalid_argument("Q: dimension mismatch");
    if (R.rows() != nu || R.cols() != nu) throw std::invalid_argument("R: dimension mismatch");
    check_symmetric_psd(Q, "Q", -1e-10);
    check_symmetric_psd(R, "R", 1e-12);  // strictly positive definite

    for (const auto& c : state_constraints) {
        if (c.alpha.size() != nx)
            throw std::invalid_argument("state_constraints: alpha dimension mismatch");
        if (!(c.delta > 0.0 && c.delta < 1.0))
            throw std::invalid_argument("state_constraints: delta must lie in (0, 1)");
    }
    for (const auto& c : input_constraints) {
        if (c.alpha.size() != nu)
            throw std::invalid_argument("input_constraints: alpha dimension mismatch");
        if (!(c.delta > 0.0 && c.delta < 1.0))
            throw std::invalid_argument("input_constraints: delta must lie in (0, 1)");
    }

    scp.validate();
    solver.validate();
}

}  // namespace covsteer
