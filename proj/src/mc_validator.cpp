#include "covsteer/mc_validator.hpp"

#include <cmath>
#include <stdexcept>

namespace covsteer {

namespace {

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
    // sigma0 may be merely PSD; clamp the tiny negative eigenvalues that
    // floating point introduces at the boundary.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t sample_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(sample_index & 0xffffffffu),
                      static_cast<std::uint32_t>(sample_index >> 32)};
    return std::mt19937_64(seq);
}

// One closed-loop rollout; the draw order (x0, p, then w per step) is part of
// the determinism contract.
Eigen::MatrixXd rollout(const SteeringProblem& problem, const Policy& policy,
                        const Eigen::MatrixXd& sqrt_sigma0, std::mt19937_64& rng,
                        Eigen::VectorXd& params_out) {
    const auto& sys = problem.system;
    const int nx = sys.n_x();
    const int N = problem.horizon;

    static const ParameterDistribution std_normal = ParameterDistribution::gaussian(1.0);
    Eigen::VectorXd z(nx);
    for (int i = 0; i < nx; ++i) z(i) = std_normal.sample(rng);
    Eigen::VectorXd x = problem.mu0 + sqrt_sigma0 * z;

    params_out.resize(sys.n_p());
    for (int j = 0; j < sys.n_p(); ++j) params_out(j) = problem.param_dists[j].sample(rng);

    Eigen::MatrixXd a = sys.a_bar;
    Eigen::MatrixXd b = sys.b_bar;
    Eigen::MatrixXd d = sys.d_bar;
    for (int j = 0; j < sys.n_p(); ++j) {
        a += sys.a_tilde[j] * params_out(j);
        b += sys.b_tilde[j] * params_out(j);
        d += sys.d_tilde[j] * params_out(j);
    }

    Eigen::MatrixXd traj(nx, N + 1);
    traj.col(0) = x;
    Eigen::VectorXd w(sys.n_w());
    for (int k = 0; k < N; ++k) {
        for (int i = 0; i < sys.n_w(); ++i) w(i) = problem.noise_dists[i].sample(rng);
        const Eigen::VectorXd u = policy.gains[k] * x + policy.feedforwards[k];
        x = a * x + b * u + d * w;
        traj.col(k + 1) = x;
    }
    return traj;
}

}  // namespace

SimulationBatch simulate(const SteeringProblem& problem, const Policy& policy,
                         int n_samples, std::uint64_t seed) {
    const auto& sys = problem.system;
    policy.validate(sys.n_x(), sys.n_u(), problem.horizon);
    if (n_samples < 2) throw std::invalid_argument("simulate: need at least 2 samples");
    for (const auto& dist : problem.param_dists)
        if (!dist.samplable()) throw std::runtime_error("oracle requires a samplable kind");
    for (const auto& dist : problem.noise_dists)
        if (!dist.samplable()) throw std::runtime_error("oracle requires a samplable kind");

    const int nx = sys.n_x();
    const int np = sys.n_p();
    const int N = problem.horizon;
    const Eigen::MatrixXd sqrt_sigma0 = psd_sqrt(problem.sigma0);

    SimulationBatch batch;
    batch.n_samples = n_samples;
    batch.seed = seed;

    // Pass 1: means of x and of x*p, constraint violation counts.
    std::vector<Eigen::VectorXd> sum_x(N + 1, Eigen::VectorXd::Zero(nx));
    std::vector<Eigen::MatrixXd> sum_xp(N + 1, Eigen::MatrixXd::Zero(nx, np));
    std::vector<std::vector<long>> state_violations(problem.state_constraints.size(),
                                                    std::vector<long>(N, 0));
    std::vector<std::vector<long>> input_violations(problem.input_constraints.size(),
                                                    std::vector<long>(N, 0));
    const int keep = std::min(n_samples, 1000);

    Eigen::VectorXd params;
    for (int s = 0; s < n_samples; ++s) {
        auto rng = sample_rng(seed, static_cast<std::uint64_t>(s));
        const Eigen::MatrixXd traj = rollout(problem, policy, sqrt_sigma0, rng, params);
        for (int t = 0; t <= N; ++t) {
            sum_x[t] += traj.col(t);
            sum_xp[t] += traj.col(t) * params.transpose();
        }
        for (std::size_t c = 0; c < problem.state_constraints.size(); ++c) {
            const auto& cc = problem.state_constraints[c];
            for (int k = 0; k < N; ++k)
                if (cc.alpha.dot(traj.col(k)) > cc.beta) ++state_violations[c][k];
        }
        for (std::size_t c = 0; c < problem.input_constraints.size(); ++c) {
            const auto& cc = problem.input_constraints[c];
            for (int k = 0; k < N; ++k) {
                const Eigen::VectorXd u = policy.gains[k] * traj.col(k) + policy.feedforwards[k];
                if (cc.alpha.dot(u) > cc.beta) ++input_violations[c][k];
            }
        }
        if (s < keep) batch.kept_trajectories.push_back(traj);
    }

    const double n = static_cast<double>(n_samples);
    batch.mean.resize(N + 1);
    batch.xp_mean.resize(N + 1);
    for (int t = 0; t <= N; ++t) {
        batch.mean[t] = sum_x[t] / n;
        batch.xp_mean[t] = sum_xp[t] / n;
    }

    // Pass 2 (regenerated samples): centered second moments and the spread of
    // the per-sample statistics, for standard-error bands.
    std::vector<Eigen::MatrixXd> sum_outer(N + 1, Eigen::MatrixXd::Zero(nx, nx));
    std::vector<Eigen::MatrixXd> sum_outer_sq(N + 1, Eigen::MatrixXd::Zero(nx, nx));
    std::vector<Eigen::MatrixXd> sum_xp_sq(N + 1, Eigen::MatrixXd::Zero(nx, np));
    for (int s = 0; s < n_samples; ++s) {
        auto rng = sample_rng(seed, static_cast<std::uint64_t>(s));
        const Eigen::MatrixXd traj = rollout(problem, policy, sqrt_sigma0, rng, params);
        for (int t = 0; t <= N; ++t) {
            const Eigen::VectorXd centered = traj.col(t) - batch.mean[t];
            const Eigen::MatrixXd outer = centered * centered.transpose();
            sum_outer[t] += outer;
            sum_outer_sq[t] += outer.cwiseProduct(outer);
            const Eigen::MatrixXd xp = traj.col(t) * params.transpose();
            sum_xp_sq[t] += xp.cwiseProduct(xp);
        }
    }

    batch.covariance.resize(N + 1);
    batch.covariance_se.resize(N + 1);
    batch.mean_se.resize(N + 1);
    batch.xp_mean_se.resize(N + 1);
    for (int t = 0; t <= N; ++t) {
        batch.covariance[t] = sum_outer[t] / (n - 1.0);
        const Eigen::MatrixXd mean_outer = sum_outer[t] / n;
        const Eigen::MatrixXd var_outer =
            (sum_outer_sq[t] / n - mean_outer.cwiseProduct(mean_outer)).cwiseMax(0.0);
        batch.covariance_se[t] = (var_outer / n).cwiseSqrt();
        batch.mean_se[t] = (batch.covariance[t].diagonal() / n).cwiseMax(0.0).cwiseSqrt();
        const Eigen::MatrixXd var_xp =
            (sum_xp_sq[t] / n - batch.xp_mean[t].cwiseProduct(batch.xp_mean[t])).cwiseMax(0.0);
        batch.xp_mean_se[t] = (var_xp / n).cwiseSqrt();
    }

    const auto to_rates = [n, N](const std::vector<std::vector<long>>& counts,
                                 std::vector<std::vector<double>>& rates,
                                 std::vector<std::vector<double>>& ses) {
        rates.assign(counts.size(), std::vector<double>(N, 0.0));
        ses.assign(counts.size(), std::vector<double>(N, 0.0));
        for (std::size_t c = 0; c < counts.size(); ++c) {
            for (int k = 0; k < N; ++k) {
                const double r = static_cast<double>(counts[c][k]) / n;
                rates[c][k] = r;
                ses[c][k] = std::sqrt(r * (1.0 - r) / n);
            }
        }
    };
    to_rates(state_violations, batch.state_violation_rate, batch.state_violation_se);
    to_rates(input_violations, batch.input_violation_rate, batch.input_violation_se);
    return batch;
}

EnumerationResult enumerate_exact(const SteeringProblem& problem, const Policy& policy,
                                  int extra_orders) {
    const auto& sys = problem.system;
    policy.validate(sys.n_x(), sys.n_u(), problem.horizon);
    if (problem.sigma0.cwiseAbs().maxCoeff() != 0.0)
        throw std::invalid_argument("enumerate_exact: requires a deterministic x0 (sigma0 = 0)");
    for (const auto& d : problem.param_dists)
        if (d.kind() != ParameterDistribution::Kind::TwoPoint)
            throw std::invalid_argument("enumerate_exact: parameters must be two_point");
    for (const auto& d : problem.noise_dists)
        if (d.kind() != ParameterDistribution::Kind::TwoPoint)
            throw std::invalid_argument("enumerate_exact: noise must be two_point");

    const int nx = sys.n_x();
    const int np = sys.n_p();
    const int nw = sys.n_w();
    const int N = problem.horizon;
    const int draws = np + N * nw;
    if (draws > 24) throw std::invalid_argument("enumerate_exact: outcome budget exceeded");

    const std::uint64_t n_outcomes = 1ull << draws;
    const double weight = 1.0 / static_cast<double>(n_outcomes);

    // Per-time accumulators over the full lattice.
    std::vector<std::vector<MultiIndex>> lattice(N + 1);
    for (int t = 0; t <= N; ++t) lattice[t] = multi_indices_up_to(np, N - t + extra_orders);

    std::vector<std::map<MultiIndex, Eigen::VectorXd>> acc_mean(N + 1);
    std::vector<std::map<IndexPair, Eigen::MatrixXd>> acc_xx(N + 1);
    std::vector<std::map<IndexPair, Eigen::VectorXd>> acc_xp(N + 1);
    std::map<MultiIndex, double> acc_p;  // E[prod p] over the deepest lattice
    for (const auto& mi : multi_indices_up_to(np, N + extra_orders)) acc_p[mi] = 0.0;
    for (int t = 0; t <= N; ++t) {
        for (const auto& a : lattice[t]) {
            acc_mean[t][a] = Eigen::VectorXd::Zero(nx);
            for (const auto& b : lattice[t]) {
                if (!(b < a)) acc_xx[t][{a, b}] = Eigen::MatrixXd::Zero(nx, nx);
                if (!b.empty()) acc_xp[t][{a, b}] = Eigen::VectorXd::Zero(nx);
            }
        }
    }

    Eigen::VectorXd p_vals(np);
    Eigen::VectorXd w(nw);
    for (std::uint64_t outcome = 0; outcome < n_outcomes; ++outcome) {
        int bit = 0;
        for (int j = 0; j < np; ++j, ++bit) {
            const double v = problem.param_dists[j].raw_moment(2);  // value^2
            const double mag = std::sqrt(v);
            p_vals(j) = (outcome >> bit) & 1u ? mag : -mag;
        }
        Eigen::MatrixXd a = sys.a_bar;
        Eigen::MatrixXd b = sys.b_bar;
        Eigen::MatrixXd d = sys.d_bar;
        for (int j = 0; j < np; ++j) {
            a += sys.a_tilde[j] * p_vals(j);
            b += sys.b_tilde[j] * p_vals(j);
            d += sys.d_tilde[j] * p_vals(j);
        }

        // Products of parameter powers for every lattice index of this outcome.
        std::map<MultiIndex, double> p_prod;
        for (const auto& [mi, unused] : acc_p) {
            double prod = 1.0;
            for (int idx : mi.indices()) prod *= p_vals(idx);
            p_prod[mi] = prod;
            acc_p[mi] += weight * prod;
        }

        Eigen::VectorXd x = problem.mu0;
        for (int t = 0; t <= N; ++t) {
            const Eigen::MatrixXd outer = x * x.transpose();
            for (const auto& a_mi : lattice[t]) {
                const double pa = p_prod.at(a_mi);
                acc_mean[t][a_mi] += weight * pa * x;
                for (const auto& b_mi : lattice[t]) {
                    const double pb = p_prod.at(b_mi);
                    if (!(b_mi < a_mi)) acc_xx[t][{a_mi, b_mi}] += weight * pa * pb * outer;
                    if (!b_mi.empty()) acc_xp[t][{a_mi, b_mi}] += weight * pa * pb * x;
                }
            }
            if (t == N) break;
            for (int i = 0; i < nw; ++i) {
                const double mag = std::sqrt(problem.noise_dists[i].raw_moment(2));
                w(i) = (outcome >> bit) & 1u ? mag : -mag;
                ++bit;
            }
            const Eigen::VectorXd u = policy.gains[t] * x + policy.feedforwards[t];
            x = a * x + b * u + d * w;
        }
    }

    // Derived (centered) moments.
    EnumerationResult result;
    result.raw_xx = acc_xx;
    result.tables.resize(N + 1);
    for (int t = 0; t <= N; ++t) {
        MomentTable& table = result.tables[t];
        table.time = t;
        table.max_order = N - t + extra_orders;
        table.mean = acc_mean[t];
        for (const auto& a : lattice[t]) {
            for (const auto& b : lattice[t]) {
                if (!(b < a))
                    table.cov_xx[{a, b}] =
                        acc_xx[t].at({a, b}) -
                        acc_mean[t].at(a) * acc_mean[t].at(b).transpose();
                if (!b.empty())
                    table.cov_xp[{a, b}] =
                        acc_xp[t].at({a, b}) - acc_mean[t].at(a) * acc_p.at(b);
            }
        }
    }
    return result;
}

}  // namespace covsteer
