#include "covsteer/convex_subproblem.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace covsteer {

namespace {

VariableLayout build_layout(const SteeringProblem& problem) {
    const int nx = problem.system.n_x();
    const int nu = problem.system.n_u();
    const int np = problem.system.n_p();
    const int N = problem.horizon;

    VariableLayout layout;
    for (int t = 0; t <= N; ++t) {
        const auto indices = multi_indices_up_to(np, N - t);
        for (const auto& mi : indices) layout.add({VarKind::Mean, t, mi, {}}, nx, 1, false);
        for (const auto& a : indices)
            for (const auto& b : indices) {
                if (b < a) continue;
                layout.add({VarKind::CovXX, t, a, b}, nx, nx, /*symmetric=*/a == b);
            }
        for (const auto& a : indices)
            for (const auto& b : indices) {
                if (b.empty()) continue;
                layout.add({VarKind::CovXP, t, a, b}, nx, 1, false);
            }
    }
    for (int k = 0; k < N; ++k) {
        layout.add({VarKind::Gain, k, {}, {}}, nu, nx, false);
        layout.add({VarKind::Feedforward, k, {}, {}}, nu, 1, false);
    }
    for (int k = 0; k < N; ++k) {
        layout.add({VarKind::EpigraphV, k, {}, {}}, 1, 1, false);
        layout.add({VarKind::EpigraphL, k, {}, {}}, 1, 1, false);
    }
    return layout;
}

class RowBuilder {
public:
    RowBuilder(const VariableLayout& layout, std::vector<std::string>& labels)
        : layout_(layout), labels_(labels) {}

    // Appends rows for an affine expression: coefficient rows of A plus
    // b = -constant, entry-by-entry (upper triangle only when symmetric).
    void add_expression(const AffineMatrix& expr, bool symmetric, const std::string& label) {
        for (int c = 0; c < expr.cols(); ++c) {
            for (int r = 0; r < expr.rows(); ++r) {
                if (symmetric && r > c) continue;
                std::map<int, double> coeffs;
                for (const auto& term : expr.terms()) {
                    // Entry (r,c) of C X D: sum over the variable's entries.
                    const auto& C = term.left;
                    const auto& D = term.right;
                    for (int a = 0; a < C.cols(); ++a) {
                        const double ca = C(r, a);
                        if (ca == 0.0) continue;
                        for (int bcol = 0; bcol < D.rows(); ++bcol) {
                            const double coeff = ca * D(bcol, c);
                            if (coeff == 0.0) continue;
                            const int var_row = term.transposed ? bcol : a;
                            const int var_col = term.transposed ? a : bcol;
                            coeffs[layout_.scalar_index(term.var, var_row, var_col)] += coeff;
                        }
                    }
                }
                start_row(label);
                for (const auto& [col, value] : coeffs)
                    if (value != 0.0) triplets_.emplace_back(row_, col, value);
                rhs_.push_back(-expr.constant_part()(r, c));
            }
        }
    }

    // Single-coefficient convenience row: coeff * x[col] with right side b.
    void add_unit_row(int col, double coeff, double b, const std::string& label) {
        start_row(label);
        triplets_.emplace_back(row_, col, coeff);
        rhs_.push_back(b);
    }

    int rows() const { return row_ + 1; }

    Eigen::SparseMatrix<double> matrix(int num_vars) const {
        Eigen::SparseMatrix<double> a(rows(), num_vars);
        a.setFromTriplets(triplets_.begin(), triplets_.end());
        return a;
    }
    Eigen::VectorXd rhs() const {
        return Eigen::Map<const Eigen::VectorXd>(rhs_.data(), rhs_.size());
    }

private:
    void start_row(const std::string& label) {
        ++row_;
        labels_.push_back(label);
    }

    const VariableLayout& layout_;
    std::vector<std::string>& labels_;
    std::vector<Eigen::Triplet<double>> triplets_;
    std::vector<double> rhs_;
    int row_ = -1;
};

// Dense accumulator for one quadratic form y'Ry with y affine in a few
// variables: contributes 2 G'RG to P, 2 G'R c to q, c'Rc to the constant.
struct QuadraticForm {
    std::vector<int> cols;
    Eigen::MatrixXd g;       // rows = dim(y), cols = cols.size()
    Eigen::VectorXd offset;  // c
};

}  // namespace

ConicProgram assemble(const SteeringProblem& problem, const ReferencePoint& ref) {
    problem.validate();
    const auto& sys = problem.system;
    const int nx = sys.n_x();
    const int nu = sys.n_u();
    const int N = problem.horizon;
    const MultiIndex none;

    ConicProgram program;
    program.layout = build_layout(problem);
    const VariableLayout& layout = program.layout;
    const int num_vars = layout.size();

    RowBuilder rows(layout, program.row_labels);
    std::vector<ConeBlock> cones;

    // --- Zero cone: initial conditions, linearized dynamics, terminal mean,
    // and (in equality mode) the terminal covariance.
    {
        const MomentTable init = init_table(problem);
        for (const auto& [mi, value] : init.mean) {
            const VarKey key{VarKind::Mean, 0, mi, {}};
            for (int i = 0; i < nx; ++i)
                rows.add_unit_row(layout.scalar_index(key, i, 0), 1.0, value(i),
                                  "init_" + to_string(key));
        }
        for (const auto& [pair, value] : init.cov_xx) {
            const VarKey key{VarKind::CovXX, 0, pair.first, pair.second};
            const bool symmetric = pair.first == pair.second;
            for (int c = 0; c < nx; ++c)
                for (int r = 0; r < nx; ++r) {
                    if (symmetric && r > c) continue;
                    rows.add_unit_row(layout.scalar_index(key, r, c), 1.0, value(r, c),
                                      "init_" + to_string(key));
                }
        }
        for (const auto& [pair, value] : init.cov_xp) {
            const VarKey key{VarKind::CovXP, 0, pair.first, pair.second};
            for (int i = 0; i < nx; ++i)
                rows.add_unit_row(layout.scalar_index(key, i, 0), 1.0, value(i),
                                  "init_" + to_string(key));
        }

        for (const auto& constraint : linearize_dynamics(problem, ref))
            rows.add_expression(constraint.expr, constraint.symmetric, constraint.label);

        const VarKey terminal_mean{VarKind::Mean, N, none, {}};
        for (int i = 0; i < nx; ++i)
            rows.add_unit_row(layout.scalar_index(terminal_mean, i, 0), 1.0,
                              problem.mu_final(i), "terminal_mean");

        if (problem.scp.terminal_mode == TerminalCovarianceMode::Equality) {
            const VarKey terminal_cov{VarKind::CovXX, N, none, none};
            for (int c = 0; c < nx; ++c)
                for (int r = 0; r <= c; ++r)
                    rows.add_unit_row(layout.scalar_index(terminal_cov, r, c), 1.0,
                                      problem.sigma_final(r, c), "terminal_cov_eq");
        }
        cones.push_back({ConeKind::Zero, rows.rows(), 0});
    }

    // --- Nonnegative cone: convexified Cantelli rows.
    {
        const int before = rows.rows();
        for (const auto& constraint : cantelli_constraints(problem, ref))
            rows.add_expression(constraint.expr, false, constraint.label);
        if (rows.rows() > before) cones.push_back({ConeKind::Nonnegative, rows.rows() - before, 0});
    }

    // --- SOC epigraphs: (r_k, v_k - vhat_k) and (t_k, vec(L_k - Lhat_k)).
    for (int k = 0; k < N; ++k) {
        const VarKey epi_v{VarKind::EpigraphV, k, {}, {}};
        const VarKey ff{VarKind::Feedforward, k, {}, {}};
        rows.add_unit_row(layout.scalar_index(epi_v, 0, 0), -1.0, 0.0, "soc_v_head");
        for (int i = 0; i < nu; ++i)
            rows.add_unit_row(layout.scalar_index(ff, i, 0), -1.0,
                              -ref.policy.feedforwards[k](i), "soc_v_tail");
        cones.push_back({ConeKind::SecondOrder, 1 + nu, 0});

        const VarKey epi_l{VarKind::EpigraphL, k, {}, {}};
        const VarKey gain{VarKind::Gain, k, {}, {}};
        rows.add_unit_row(layout.scalar_index(epi_l, 0, 0), -1.0, 0.0, "soc_l_head");
        for (int c = 0; c < nx; ++c)
            for (int r = 0; r < nu; ++r)
                rows.add_unit_row(layout.scalar_index(gain, r, c), -1.0,
                                  -ref.policy.gains[k](r, c), "soc_l_tail");
        cones.push_back({ConeKind::SecondOrder, 1 + nu * nx, 0});
    }

    // --- PSD block: Sigma[x_N] <= Sigma_F in the relaxed terminal mode.
    if (problem.scp.terminal_mode == TerminalCovarianceMode::PsdInequality) {
        const VarKey terminal_cov{VarKind::CovXX, N, none, none};
        const double rt2 = std::sqrt(2.0);
        const Eigen::VectorXd sf = svec(problem.sigma_final);
        int entry = 0;
        for (int c = 0; c < nx; ++c)
            for (int r = 0; r <= c; ++r) {
                rows.add_unit_row(layout.scalar_index(terminal_cov, r, c), r == c ? 1.0 : rt2,
                                  sf(entry), "terminal_cov_psd");
                ++entry;
            }
        cones.push_back({ConeKind::PositiveSemidefinite, svec_size(nx), nx});
    }

    program.constraints = rows.matrix(num_vars);
    program.rhs = rows.rhs();
    program.cones = std::move(cones);

    // --- Objective.
    std::vector<Eigen::Triplet<double>> p_triplets;
    Eigen::VectorXd q = Eigen::VectorXd::Zero(num_vars);
    double constant = 0.0;

    for (int k = 0; k < N; ++k) {
        const VarKey mean_key{VarKind::Mean, k, none, {}};
        const VarKey cov_key{VarKind::CovXX, k, none, none};
        const VarKey gain_key{VarKind::Gain, k, {}, {}};
        const VarKey ff_key{VarKind::Feedforward, k, {}, {}};
        const Eigen::MatrixXd& gain_hat = ref.policy.gains[k];
        const Eigen::VectorXd mu_hat = ref.tables[k].mean_of(none);
        const Eigen::MatrixXd sigma_hat = ref.tables[k].xx(none, none);

        // mu' Q mu.
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nx; ++j)
                if (problem.Q(i, j) != 0.0)
                    p_triplets.emplace_back(layout.scalar_index(mean_key, i, 0),
                                            layout.scalar_index(mean_key, j, 0),
                                            2.0 * problem.Q(i, j));

        // (v + lin2(L, mu))' R (v + lin2(L, mu)) via a dense local form.
        QuadraticForm form;
        for (int i = 0; i < nu; ++i) form.cols.push_back(layout.scalar_index(ff_key, i, 0));
        for (int j = 0; j < nx; ++j) form.cols.push_back(layout.scalar_index(mean_key, j, 0));
        for (int c = 0; c < nx; ++c)
            for (int r = 0; r < nu; ++r) form.cols.push_back(layout.scalar_index(gain_key, r, c));
        form.g = Eigen::MatrixXd::Zero(nu, form.cols.size());
        form.g.block(0, 0, nu, nu).setIdentity();
        form.g.block(0, nu, nu, nx) = gain_hat;
        for (int c = 0; c < nx; ++c)
            for (int r = 0; r < nu; ++r) form.g(r, nu + nx + c * nu + r) = mu_hat(c);
        form.offset = -gain_hat * mu_hat;

        const Eigen::MatrixXd grg = 2.0 * form.g.transpose() * problem.R * form.g;
        for (std::size_t i = 0; i < form.cols.size(); ++i)
            for (std::size_t j = 0; j < form.cols.size(); ++j)
                if (grg(i, j) != 0.0)
                    p_triplets.emplace_back(form.cols[i], form.cols[j], grg(i, j));
        const Eigen::VectorXd grc = 2.0 * form.g.transpose() * problem.R * form.offset;
        for (std::size_t i = 0; i < form.cols.size(); ++i) q(form.cols[i]) += grc(i);
        constant += form.offset.dot(problem.R * form.offset);

        // tr(Sigma Q).
        for (int c = 0; c < nx; ++c)
            for (int r = 0; r <= c; ++r) {
                const double w = (r == c) ? problem.Q(r, r) : 2.0 * problem.Q(r, c);
                if (w != 0.0) q(layout.scalar_index(cov_key, r, c)) += w;
            }

        // tr(lin3(L, Sigma, L') R), linear in L and Sigma.
        const Eigen::MatrixXd m1 = sigma_hat * gain_hat.transpose() * problem.R;  // d/dL of tr(L .)
        const Eigen::MatrixXd m2 = problem.R * gain_hat * sigma_hat;              // d/dL of tr(. L')
        for (int c = 0; c < nx; ++c)
            for (int r = 0; r < nu; ++r)
                q(layout.scalar_index(gain_key, r, c)) += m1(c, r) + m2(r, c);
        const Eigen::MatrixXd lrl = gain_hat.transpose() * problem.R * gain_hat;
        for (int c = 0; c < nx; ++c)
            for (int r = 0; r <= c; ++r)
                q(layout.scalar_index(cov_key, r, c)) += (r == c) ? lrl(r, r)
                                                                  : lrl(c, r) + lrl(r, c);
        constant += -2.0 * (gain_hat * sigma_hat * gain_hat.transpose() * problem.R).trace();

        // Trust-region weights on the epigraph variables.
        q(layout.scalar_index({VarKind::EpigraphV, k, {}, {}}, 0, 0)) +=
            problem.scp.trust_region_weight;
        q(layout.scalar_index({VarKind::EpigraphL, k, {}, {}}, 0, 0)) +=
            problem.scp.trust_region_weight;
    }

    program.quadratic = Eigen::SparseMatrix<double>(num_vars, num_vars);
    program.quadratic.setFromTriplets(p_triplets.begin(), p_triplets.end());
    program.linear = std::move(q);
    program.constant = constant;

    // Per-variable magnitude hints from the reference trajectory; the
    // parameter-moment lattice spans many orders of magnitude while the
    // policy block stays O(1).
    program.var_scale_hint = Eigen::VectorXd::Ones(num_vars);
    for (const auto& [key, slice] : layout.slices()) {
        if (key.kind == VarKind::Gain || key.kind == VarKind::Feedforward ||
            key.kind == VarKind::EpigraphV || key.kind == VarKind::EpigraphL)
            continue;
        const Eigen::MatrixXd hat = reference_value(ref, key);
        for (int c = 0; c < slice.cols; ++c)
            for (int r = 0; r < slice.rows; ++r) {
                if (slice.symmetric && r > c) continue;
                const int idx = layout.scalar_index(key, r, c);
                program.var_scale_hint(idx) = std::max(1.0, std::abs(hat(r, c)));
            }
    }
    return program;
}

Eigen::VectorXd pack_reference(const ConicProgram& program, const ReferencePoint& ref) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(program.num_vars());
    for (const auto& [key, slice] : program.layout.slices())
        program.layout.set_value(x, key, reference_value(ref, key));
    return x;
}

SubproblemSolution extract_policy(const ConicProgram& program, const SteeringProblem& problem,
                                  const Eigen::VectorXd& x) {
    if (x.size() != program.num_vars())
        throw std::invalid_argument("extract_policy: solution size mismatch");
    const MultiIndex none;
    SubproblemSolution out;
    for (int k = 0; k < problem.horizon; ++k) {
        out.policy.gains.push_back(program.layout.get_value(x, {VarKind::Gain, k, {}, {}}));
        out.policy.feedforwards.push_back(
            program.layout.get_value(x, {VarKind::Feedforward, k, {}, {}}));
    }
    out.terminal_mean = program.layout.get_value(x, {VarKind::Mean, problem.horizon, none, {}});
    out.terminal_cov =
        program.layout.get_value(x, {VarKind::CovXX, problem.horizon, none, none});
    return out;
}

}  // namespace covsteer
