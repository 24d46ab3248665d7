#include "covsteer/linearizer.hpp"

#include <cmath>
#include <stdexcept>

namespace covsteer {

ReferencePoint ReferencePoint::at(const SteeringProblem& problem, Policy policy) {
    ReferencePoint ref;
    ref.tables = propagate(problem, policy);
    ref.policy = std::move(policy);
    return ref;
}

Eigen::MatrixXd reference_value(const ReferencePoint& ref, const VarKey& key) {
    switch (key.kind) {
        case VarKind::Mean:
            return ref.tables.at(key.time).mean_of(key.a);
        case VarKind::CovXX:
            return ref.tables.at(key.time).xx(key.a, key.b);
        case VarKind::CovXP:
            return ref.tables.at(key.time).xp(key.a, key.b);
        case VarKind::Gain:
            return ref.policy.gains.at(key.time);
        case VarKind::Feedforward:
            return ref.policy.feedforwards.at(key.time);
        case VarKind::EpigraphV:
        case VarKind::EpigraphL:
            return Eigen::MatrixXd::Zero(1, 1);
    }
    throw std::logic_error("reference_value: unknown variable kind");
}

AffineMatrix mean_expr(const SteeringProblem& problem, int t, const MultiIndex& mi) {
    return AffineMatrix::variable({VarKind::Mean, t, mi, {}}, problem.system.n_x(), 1);
}

AffineMatrix cov_xx_expr(const SteeringProblem& problem, int t, const MultiIndex& a,
                         const MultiIndex& b) {
    const int n = problem.system.n_x();
    if (b < a)
        return AffineMatrix::variable({VarKind::CovXX, t, b, a}, n, n).transpose();
    return AffineMatrix::variable({VarKind::CovXX, t, a, b}, n, n);
}

AffineMatrix cov_xp_expr(const SteeringProblem& problem, int t, const MultiIndex& a,
                         const MultiIndex& b) {
    const int n = problem.system.n_x();
    if (b.empty()) return AffineMatrix(n, 1);  // covariance against a constant
    return AffineMatrix::variable({VarKind::CovXP, t, a, b}, n, 1);
}

AffineMatrix gain_expr(const SteeringProblem& problem, int k) {
    return AffineMatrix::variable({VarKind::Gain, k, {}, {}}, problem.system.n_u(),
                                  problem.system.n_x());
}

AffineMatrix feedforward_expr(const SteeringProblem& problem, int k) {
    return AffineMatrix::variable({VarKind::Feedforward, k, {}, {}}, problem.system.n_u(), 1);
}

namespace {

// Bundles everything the per-step builders touch.
struct StepContext {
    const SteeringProblem& problem;
    const ReferencePoint& ref;
    int t;  // source time of the transition

    AffineMatrix gain;
    Eigen::MatrixXd gain_hat;
    AffineMatrix gain_t;          // L^T as an expression
    Eigen::MatrixXd gain_hat_t;
    AffineMatrix ff;
    Eigen::VectorXd ff_hat;
    AffineMatrix ff_t;            // v^T
    Eigen::MatrixXd ff_hat_t;

    StepContext(const SteeringProblem& p, const ReferencePoint& r, int time)
        : problem(p), ref(r), t(time),
          gain(gain_expr(p, time)),
          gain_hat(r.policy.gains.at(time)),
          gain_t(gain.transpose()),
          gain_hat_t(gain_hat.transpose()),
          ff(feedforward_expr(p, time)),
          ff_hat(r.policy.feedforwards.at(time)),
          ff_t(ff.transpose()),
          ff_hat_t(ff_hat.transpose()) {}

    const MomentTable& table() const { return ref.tables.at(t); }

    AffineMatrix xx(const MultiIndex& a, const MultiIndex& b) const {
        return cov_xx_expr(problem, t, a, b);
    }
    Eigen::MatrixXd xx_hat(const MultiIndex& a, const MultiIndex& b) const {
        return table().xx(a, b);
    }
    AffineMatrix xp(const MultiIndex& a, const MultiIndex& b) const {
        return cov_xp_expr(problem, t, a, b);
    }
    Eigen::MatrixXd xp_hat(const MultiIndex& a, const MultiIndex& b) const {
        return table().xp(a, b);
    }
    // Cov(prod(a), x prod(b)) as a 1 x n_x row: the transpose of an xp block.
    AffineMatrix px(const MultiIndex& a, const MultiIndex& b) const {
        return cov_xp_expr(problem, t, b, a).transpose();
    }
    Eigen::MatrixXd px_hat(const MultiIndex& a, const MultiIndex& b) const {
        return table().xp(b, a).transpose();
    }

    double e(const MultiIndex& mi) const { return joint_moment(problem.param_dists, mi); }
    double spp(const MultiIndex& a, const MultiIndex& b) const {
        return param_cov(problem.param_dists, a, b);
    }

    // Linearization of (E + F L) M (G + H L)^T for an xx-cov block M.
    AffineMatrix quad(const Eigen::MatrixXd& e_left, const Eigen::MatrixXd& f_left,
                      const Eigen::MatrixXd& g_right, const Eigen::MatrixXd& h_right,
                      const AffineMatrix& m, const Eigen::MatrixXd& m_hat) const {
        AffineMatrix out = e_left * m * g_right.transpose();
        out += e_left * lin2(m, m_hat, gain_t, gain_hat_t) * h_right.transpose();
        out += f_left * lin2(gain, gain_hat, m, m_hat) * g_right.transpose();
        out += f_left * lin3(gain, gain_hat, m, m_hat, gain_t, gain_hat_t) *
               h_right.transpose();
        return out;
    }
    // Linearization of (E + F L) m (G v)^T for an xp column m.
    AffineMatrix cross_right(const Eigen::MatrixXd& e_left, const Eigen::MatrixXd& f_left,
                             const AffineMatrix& m, const Eigen::MatrixXd& m_hat,
                             const Eigen::MatrixXd& g_right) const {
        AffineMatrix out = e_left * lin2(m, m_hat, ff_t, ff_hat_t) * g_right.transpose();
        out += f_left * lin3(gain, gain_hat, m, m_hat, ff_t, ff_hat_t) * g_right.transpose();
        return out;
    }
    // Linearization of (F v) r (G + H L)^T for a px row r.
    AffineMatrix cross_left(const Eigen::MatrixXd& f_left, const AffineMatrix& r,
                            const Eigen::MatrixXd& r_hat, const Eigen::MatrixXd& g_right,
                            const Eigen::MatrixXd& h_right) const {
        AffineMatrix out = f_left * lin2(ff, ff_hat, r, r_hat) * g_right.transpose();
        out += f_left * lin3(ff, ff_hat, r, r_hat, gain_t, gain_hat_t) * h_right.transpose();
        return out;
    }
    // Linearization of (F v) c (G v)^T for a scalar parameter covariance c.
    AffineMatrix ff_pair(const Eigen::MatrixXd& f_left, double c,
                         const Eigen::MatrixXd& g_right) const {
        const Eigen::MatrixXd c_mat = Eigen::MatrixXd::Constant(1, 1, c);
        AffineMatrix out = f_left *
                           lin3(ff, ff_hat, AffineMatrix::constant(c_mat), c_mat, ff_t, ff_hat_t) *
                           g_right.transpose();
        return out;
    }
};

// Linearized mean transition (the f-bar map).
AffineMatrix linearized_mean_step(const StepContext& ctx, const MultiIndex& mi) {
    const auto& sys = ctx.problem.system;
    AffineMatrix out = sys.a_bar * mean_expr(ctx.problem, ctx.t, mi);
    out += sys.b_bar *
           lin2(ctx.gain, ctx.gain_hat, mean_expr(ctx.problem, ctx.t, mi),
                ctx.table().mean_of(mi));
    out += (sys.b_bar * ctx.e(mi)) * ctx.ff;
    for (int j = 0; j < sys.n_p(); ++j) {
        const MultiIndex mi_j = mi.plus(j);
        out += sys.a_tilde[j] * mean_expr(ctx.problem, ctx.t, mi_j);
        out += sys.b_tilde[j] *
               lin2(ctx.gain, ctx.gain_hat, mean_expr(ctx.problem, ctx.t, mi_j),
                    ctx.table().mean_of(mi_j));
        out += (sys.b_tilde[j] * ctx.e(mi_j)) * ctx.ff;
    }
    return out;
}

// Linearized xp-cov transition (the h-bar map).
AffineMatrix linearized_cov_xp_step(const StepContext& ctx, const MultiIndex& a,
                                    const MultiIndex& b) {
    const auto& sys = ctx.problem.system;
    AffineMatrix out = sys.a_bar * ctx.xp(a, b);
    out += sys.b_bar * lin2(ctx.gain, ctx.gain_hat, ctx.xp(a, b), ctx.xp_hat(a, b));
    out += (sys.b_bar * ctx.spp(a, b)) * ctx.ff;
    for (int i = 0; i < sys.n_p(); ++i) {
        const MultiIndex ai = a.plus(i);
        out += sys.a_tilde[i] * ctx.xp(ai, b);
        out += sys.b_tilde[i] * lin2(ctx.gain, ctx.gain_hat, ctx.xp(ai, b), ctx.xp_hat(ai, b));
        out += (sys.b_tilde[i] * ctx.spp(ai, b)) * ctx.ff;
    }
    return out;
}

// Linearized xx-cov transition (the g-bar map), term for term.
AffineMatrix linearized_cov_xx_step(const StepContext& ctx, const MultiIndex& a,
                                    const MultiIndex& b) {
    const auto& sys = ctx.problem.system;
    const int np = sys.n_p();
    const Eigen::MatrixXd& A = sys.a_bar;
    const Eigen::MatrixXd& B = sys.b_bar;
    const Eigen::MatrixXd& D = sys.d_bar;

    AffineMatrix out = ctx.quad(A, B, A, B, ctx.xx(a, b), ctx.xx_hat(a, b));
    out += ctx.cross_right(A, B, ctx.xp(a, b), ctx.xp_hat(a, b), B);
    for (int j = 0; j < np; ++j) {
        const MultiIndex bj = b.plus(j);
        out += ctx.quad(A, B, sys.a_tilde[j], sys.b_tilde[j], ctx.xx(a, bj), ctx.xx_hat(a, bj));
        out += ctx.cross_right(A, B, ctx.xp(a, bj), ctx.xp_hat(a, bj), sys.b_tilde[j]);
    }

    out += ctx.cross_left(B, ctx.px(a, b), ctx.px_hat(a, b), A, B);
    out += ctx.ff_pair(B, ctx.spp(a, b), B);
    for (int j = 0; j < np; ++j) {
        const MultiIndex bj = b.plus(j);
        out += ctx.cross_left(B, ctx.px(a, bj), ctx.px_hat(a, bj), sys.a_tilde[j],
                              sys.b_tilde[j]);
        out += ctx.ff_pair(B, ctx.spp(a, bj), sys.b_tilde[j]);
    }

    const MultiIndex ab = a.merged(b);
    Eigen::MatrixXd constant = D * ctx.e(ab) * D.transpose();
    for (int j = 0; j < np; ++j)
        constant += D * ctx.e(ab.plus(j)) * sys.d_tilde[j].transpose();
    for (int i = 0; i < np; ++i) {
        const MultiIndex abi = ab.plus(i);
        constant += sys.d_tilde[i] * ctx.e(abi) * D.transpose();
        for (int j = 0; j < np; ++j)
            constant += sys.d_tilde[i] * ctx.e(abi.plus(j)) * sys.d_tilde[j].transpose();
    }
    out += AffineMatrix::constant(constant);

    for (int i = 0; i < np; ++i) {
        const MultiIndex ai = a.plus(i);
        out += ctx.quad(sys.a_tilde[i], sys.b_tilde[i], A, B, ctx.xx(ai, b), ctx.xx_hat(ai, b));
        out += ctx.cross_right(sys.a_tilde[i], sys.b_tilde[i], ctx.xp(ai, b), ctx.xp_hat(ai, b),
                               B);
        for (int j = 0; j < np; ++j) {
            const MultiIndex bj = b.plus(j);
            out += ctx.quad(sys.a_tilde[i], sys.b_tilde[i], sys.a_tilde[j], sys.b_tilde[j],
                            ctx.xx(ai, bj), ctx.xx_hat(ai, bj));
            out += ctx.cross_right(sys.a_tilde[i], sys.b_tilde[i], ctx.xp(ai, bj),
                                   ctx.xp_hat(ai, bj), sys.b_tilde[j]);
        }
    }
    for (int i = 0; i < np; ++i) {
        const MultiIndex ai = a.plus(i);
        out += ctx.cross_left(sys.b_tilde[i], ctx.px(ai, b), ctx.px_hat(ai, b), A, B);
        out += ctx.ff_pair(sys.b_tilde[i], ctx.spp(ai, b), B);
        for (int j = 0; j < np; ++j) {
            const MultiIndex bj = b.plus(j);
            out += ctx.cross_left(sys.b_tilde[i], ctx.px(ai, bj), ctx.px_hat(ai, bj),
                                  sys.a_tilde[j], sys.b_tilde[j]);
            out += ctx.ff_pair(sys.b_tilde[i], ctx.spp(ai, bj), sys.b_tilde[j]);
        }
    }
    return out;
}

}  // namespace

ConstraintSet linearize_dynamics(const SteeringProblem& problem, const ReferencePoint& ref) {
    const int np = problem.system.n_p();
    const int N = problem.horizon;
    ConstraintSet constraints;

    for (int t = 0; t < N; ++t) {
        const StepContext ctx(problem, ref, t);
        const int next_order = N - (t + 1);
        const auto next_indices = multi_indices_up_to(np, next_order);

        for (const auto& mi : next_indices) {
            AffineConstraint c;
            c.expr = mean_expr(problem, t + 1, mi) - linearized_mean_step(ctx, mi);
            c.label = "dyn_" + to_string(VarKey{VarKind::Mean, t + 1, mi, {}});
            constraints.push_back(std::move(c));
        }
        for (const auto& a : next_indices) {
            for (const auto& b : next_indices) {
                if (b < a) continue;
                AffineConstraint c;
                c.expr = cov_xx_expr(problem, t + 1, a, b) - linearized_cov_xx_step(ctx, a, b);
                c.symmetric = (a == b);
                c.label = "dyn_" + to_string(VarKey{VarKind::CovXX, t + 1, a, b});
                constraints.push_back(std::move(c));
            }
        }
        for (const auto& a : next_indices) {
            for (const auto& b : next_indices) {
                if (b.empty()) continue;
                AffineConstraint c;
                c.expr = cov_xp_expr(problem, t + 1, a, b) - linearized_cov_xp_step(ctx, a, b);
                c.label = "dyn_" + to_string(VarKey{VarKind::CovXP, t + 1, a, b});
                constraints.push_back(std::move(c));
            }
        }
    }
    return constraints;
}

ConstraintSet cantelli_constraints(const SteeringProblem& problem, const ReferencePoint& ref,
                                   double lambda_floor) {
    ConstraintSet constraints;
    const MultiIndex none;
    for (int k = 0; k < problem.horizon; ++k) {
        const Eigen::MatrixXd sigma_hat = ref.tables.at(k).xx(none, none);
        const Eigen::VectorXd mu_hat = ref.tables.at(k).mean_of(none);
        const Eigen::MatrixXd& gain_hat = ref.policy.gains.at(k);

        for (std::size_t i = 0; i < problem.state_constraints.size(); ++i) {
            const auto& cc = problem.state_constraints[i];
            const double factor = cc.cantelli_factor();
            const double lam = std::max(cc.alpha.dot(sigma_hat * cc.alpha), lambda_floor);
            const Eigen::MatrixXd alpha_row = cc.alpha.transpose();

            AffineMatrix expr =
                (alpha_row * cov_xx_expr(problem, k, none, none) * cc.alpha)
                    .scaled(factor / (2.0 * std::sqrt(lam)));
            expr += alpha_row * mean_expr(problem, k, none);
            expr += AffineMatrix::constant(Eigen::MatrixXd::Constant(
                1, 1, factor * std::sqrt(lam) / 2.0 - cc.beta));

            AffineConstraint c;
            c.expr = std::move(expr);
            c.sense = ConstraintSense::LessEqual;
            c.label = "cantelli_state[" + std::to_string(i) + ",k=" + std::to_string(k) + "]";
            constraints.push_back(std::move(c));
        }

        for (std::size_t i = 0; i < problem.input_constraints.size(); ++i) {
            const auto& cc = problem.input_constraints[i];
            const double factor = cc.cantelli_factor();
            const Eigen::MatrixXd lsl = gain_hat * sigma_hat * gain_hat.transpose();
            const double lam = std::max(cc.alpha.dot(lsl * cc.alpha), lambda_floor);
            const Eigen::MatrixXd alpha_row = cc.alpha.transpose();

            const StepContext ctx(problem, ref, k);
            AffineMatrix quad =
                lin3(ctx.gain, ctx.gain_hat, cov_xx_expr(problem, k, none, none), sigma_hat,
                     ctx.gain_t, ctx.gain_hat_t);
            AffineMatrix expr =
                (alpha_row * quad * cc.alpha).scaled(factor / (2.0 * std::sqrt(lam)));
            expr += alpha_row * feedforward_expr(problem, k);
            expr += alpha_row * lin2(ctx.gain, ctx.gain_hat, mean_expr(problem, k, none), mu_hat);
            expr += AffineMatrix::constant(Eigen::MatrixXd::Constant(
                1, 1, factor * std::sqrt(lam) / 2.0 - cc.beta));

            AffineConstraint c;
            c.expr = std::move(expr);
            c.sense = ConstraintSense::LessEqual;
            c.label = "cantelli_input[" + std::to_string(i) + ",k=" + std::to_string(k) + "]";
            constraints.push_back(std::move(c));
        }
    }
    return constraints;
}

}  // namespace covsteer
