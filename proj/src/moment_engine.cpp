#include "covsteer/moment_engine.hpp"

#include <nlohmann/json.hpp>
#include <stdexcept>

namespace covsteer {

namespace {

double asymmetry(const Eigen::MatrixXd& m) {
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace

MomentTable init_table(const SteeringProblem& problem, int extra_orders) {
    const auto& sigma0 = problem.sigma0;
    if (asymmetry(sigma0) > 1e-12)
        throw std::invalid_argument("invalid initial covariance: asymmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma0, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw std::invalid_argument("invalid initial covariance: negative eigenvalue");

    const auto& dists = problem.param_dists;
    const auto& mu0 = problem.mu0;
    const Eigen::MatrixXd second_raw = sigma0 + mu0 * mu0.transpose();  // E[x0 x0']

    MomentTable table;
    table.time = 0;
    table.max_order = problem.horizon + extra_orders;
    const auto indices = multi_indices_up_to(problem.system.n_p(), table.max_order);

    for (const auto& mi : indices) table.mean[mi] = mu0 * joint_moment(dists, mi);

    for (const auto& a : indices) {
        for (const auto& b : indices) {
            const double e_ab = joint_moment(dists, a.merged(b));
            const double e_a = joint_moment(dists, a);
            const double e_b = joint_moment(dists, b);
            if (!(b < a))
                table.cov_xx[{a, b}] =
                    second_raw * e_ab - (mu0 * mu0.transpose()) * (e_a * e_b);
            if (!b.empty()) table.cov_xp[{a, b}] = mu0 * (e_ab - e_a * e_b);
        }
    }
    return table;
}

std::map<MultiIndex, Eigen::VectorXd> step_mean(const MomentTable& table,
                                                const Eigen::MatrixXd& gain,
                                                const Eigen::VectorXd& feedforward,
                                                const SteeringProblem& problem,
                                                int target_max_order) {
    const auto& sys = problem.system;
    const auto& dists = problem.param_dists;
    const Eigen::MatrixXd ab = sys.a_bar + sys.b_bar * gain;
    const Eigen::VectorXd bv = sys.b_bar * feedforward;

    std::map<MultiIndex, Eigen::VectorXd> out;
    for (const auto& mi : multi_indices_up_to(sys.n_p(), target_max_order)) {
        Eigen::VectorXd next = ab * table.mean_of(mi) + bv * joint_moment(dists, mi);
        for (int j = 0; j < sys.n_p(); ++j) {
            const MultiIndex mi_j = mi.plus(j);
            next += (sys.a_tilde[j] + sys.b_tilde[j] * gain) * table.mean_of(mi_j) +
                    (sys.b_tilde[j] * feedforward) * joint_moment(dists, mi_j);
        }
        out[mi] = next;
    }
    return out;
}

void step_cov(const MomentTable& table, const Eigen::MatrixXd& gain,
              const Eigen::VectorXd& feedforward, const SteeringProblem& problem,
              int target_max_order, std::map<IndexPair, Eigen::MatrixXd>& cov_xx_out,
              std::map<IndexPair, Eigen::VectorXd>& cov_xp_out) {
    const auto& sys = problem.system;
    const auto& dists = problem.param_dists;
    const int np = sys.n_p();

    const Eigen::MatrixXd ab = sys.a_bar + sys.b_bar * gain;
    const Eigen::VectorXd bv = sys.b_bar * feedforward;
    std::vector<Eigen::MatrixXd> abt(np);
    std::vector<Eigen::VectorXd> btv(np);
    for (int j = 0; j < np; ++j) {
        abt[j] = sys.a_tilde[j] + sys.b_tilde[j] * gain;
        btv[j] = sys.b_tilde[j] * feedforward;
    }
    const auto e = [&](const MultiIndex& mi) { return joint_moment(dists, mi); };
    const auto spp = [&](const MultiIndex& a, const MultiIndex& b) {
        return param_cov(dists, a, b);
    };

    const auto indices = multi_indices_up_to(np, target_max_order);

    cov_xx_out.clear();
    cov_xp_out.clear();
    for (const auto& a : indices) {
        for (const auto& b : indices) {
            if (!b.empty()) {
                // xp recursion.
                Eigen::VectorXd next = ab * table.xp(a, b) + bv * spp(a, b);
                for (int i = 0; i < np; ++i) {
                    const MultiIndex ai = a.plus(i);
                    next += abt[i] * table.xp(ai, b) + btv[i] * spp(ai, b);
                }
                cov_xp_out[{a, b}] = next;
            }
            if (b < a) continue;  // canonical xx pairs only; the swap is the transpose

            // xx recursion, term for term.
            Eigen::MatrixXd next = ab * table.xx(a, b) * ab.transpose();
            next += (ab * table.xp(a, b)) * bv.transpose();
            for (int j = 0; j < np; ++j) {
                const MultiIndex bj = b.plus(j);
                next += ab * table.xx(a, bj) * abt[j].transpose();
                next += (ab * table.xp(a, bj)) * btv[j].transpose();
            }
            next += bv * (table.xp(b, a)).transpose() * ab.transpose();
            next += bv * spp(a, b) * bv.transpose();
            for (int j = 0; j < np; ++j) {
                const MultiIndex bj = b.plus(j);
                next += bv * (table.xp(bj, a)).transpose() * abt[j].transpose();
                next += bv * spp(a, bj) * btv[j].transpose();
            }
            const MultiIndex ab_union = a.merged(b);
            next += sys.d_bar * e(ab_union) * sys.d_bar.transpose();
            for (int j = 0; j < np; ++j)
                next += sys.d_bar * e(ab_union.plus(j)) * sys.d_tilde[j].transpose();
            for (int i = 0; i < np; ++i) {
                const MultiIndex ai = a.plus(i);
                next += abt[i] * table.xx(ai, b) * ab.transpose();
                next += (abt[i] * table.xp(ai, b)) * bv.transpose();
                for (int j = 0; j < np; ++j) {
                    const MultiIndex bj = b.plus(j);
                    next += abt[i] * table.xx(ai, bj) * abt[j].transpose();
                    next += (abt[i] * table.xp(ai, bj)) * btv[j].transpose();
                }
            }
            for (int i = 0; i < np; ++i) {
                const MultiIndex ai = a.plus(i);
                next += btv[i] * (table.xp(b, ai)).transpose() * ab.transpose();
                next += btv[i] * spp(ai, b) * bv.transpose();
                for (int j = 0; j < np; ++j) {
                    const MultiIndex bj = b.plus(j);
                    next += btv[i] * (table.xp(bj, ai)).transpose() * abt[j].transpose();
                    next += btv[i] * spp(ai, bj) * btv[j].transpose();
                }
            }
            for (int i = 0; i < np; ++i) {
                const MultiIndex aib = ab_union.plus(i);
                next += sys.d_tilde[i] * e(aib) * sys.d_bar.transpose();
                for (int j = 0; j < np; ++j)
                    next += sys.d_tilde[i] * e(aib.plus(j)) * sys.d_tilde[j].transpose();
            }

            if (a == b) {
                // Drift alarm, relative to the block magnitude: high-order
                // gaussian lattices legitimately carry entries ~1e10 where an
                // absolute 1e-9 is below representable roundoff.
                const double magnitude = std::max(1.0, next.cwiseAbs().maxCoeff());
                if (asymmetry(next) > 1e-9 * magnitude)
                    throw std::runtime_error("numerical symmetry breach");
                next = 0.5 * (next + next.transpose()).eval();
            }
            cov_xx_out[{a, b}] = next;
        }
    }
}

std::vector<MomentTable> propagate(const SteeringProblem& problem, const Policy& policy,
                                   int extra_orders) {
    const auto& sys = problem.system;
    policy.validate(sys.n_x(), sys.n_u(), problem.horizon);
    if (extra_orders < 0) throw std::invalid_argument("propagate: extra_orders must be >= 0");

    std::vector<MomentTable> tables;
    tables.reserve(problem.horizon + 1);
    tables.push_back(init_table(problem, extra_orders));
    for (int t = 0; t < problem.horizon; ++t) {
        const int next_order = problem.horizon - (t + 1) + extra_orders;
        MomentTable next;
        next.time = t + 1;
        next.max_order = next_order;
        next.mean = step_mean(tables.back(), policy.gains[t], policy.feedforwards[t],
                              problem, next_order);
        step_cov(tables.back(), policy.gains[t], policy.feedforwards[t], problem,
                 next_order, next.cov_xx, next.cov_xp);
        tables.push_back(std::move(next));
    }
    return tables;
}

double exact_cost(const SteeringProblem& problem, const Policy& policy,
                  const std::vector<MomentTable>& tables) {
    const MultiIndex none;
    double cost = 0.0;
    for (int k = 0; k < problem.horizon; ++k) {
        const auto& mu = tables[k].mean_of(none);
        const Eigen::MatrixXd sigma = tables[k].xx(none, none);
        const auto& gain = policy.gains[k];
        const Eigen::VectorXd u_mean = policy.feedforwards[k] + gain * mu;
        cost += mu.dot(problem.Q * mu) + u_mean.dot(problem.R * u_mean);
        cost += (sigma * problem.Q).trace();
        cost += (gain * sigma * gain.transpose() * problem.R).trace();
    }
    return cost;
}

std::string tables_to_json(const std::vector<MomentTable>& tables) {
    nlohmann::json out = nlohmann::json::array();
    const auto mi_json = [](const MultiIndex& mi) { return nlohmann::json(mi.indices()); };
    const auto mat_json = [](const Eigen::MatrixXd& m) {
        std::vector<double> values(m.size());
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c) values[r * m.cols() + c] = m(r, c);
        return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"values", values}};
    };
    for (const auto& table : tables) {
        nlohmann::json jt;
        jt["time"] = table.time;
        jt["max_order"] = table.max_order;
        jt["mean"] = nlohmann::json::array();
        for (const auto& [mi, v] : table.mean)
            jt["mean"].push_back({{"index", mi_json(mi)}, {"value", mat_json(v)}});
        jt["cov_xx"] = nlohmann::json::array();
        for (const auto& [key, m] : table.cov_xx)
            jt["cov_xx"].push_back({{"a", mi_json(key.first)},
                                    {"b", mi_json(key.second)},
                                    {"value", mat_json(m)}});
        jt["cov_xp"] = nlohmann::json::array();
        for (const auto& [key, v] : table.cov_xp)
            jt["cov_xp"].push_back({{"a", mi_json(key.first)},
                                    {"b", mi_json(key.second)},
                                    {"value", mat_json(v)}});
        out.push_back(std::move(jt));
    }
    return out.dump(2);
}

}  // namespace covsteer
