#include "covsteer/conic_solver.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace covsteer {

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::MaxIters: return "max_iters";
        case SolveStatus::PrimalInfeasibleCert: return "primal_infeasible";
        case SolveStatus::DualInfeasibleCert: return "dual_infeasible";
    }
    return "unknown";
}

Eigen::VectorXd project_cone(const ConeBlock& block, const Eigen::VectorXd& v) {
    switch (block.kind) {
        case ConeKind::Zero:
            return Eigen::VectorXd::Zero(v.size());
        case ConeKind::Nonnegative:
            return v.cwiseMax(0.0);
        case ConeKind::SecondOrder: {
            if (v.size() == 1) return v.cwiseMax(0.0);
            const double t = v(0);
            const double norm = v.tail(v.size() - 1).norm();
            if (norm <= t) return v;
            if (norm <= -t) return Eigen::VectorXd::Zero(v.size());
            Eigen::VectorXd out(v.size());
            const double scale = 0.5 * (1.0 + t / norm);
            out(0) = 0.5 * (norm + t);
            out.tail(v.size() - 1) = scale * v.tail(v.size() - 1);
            return out;
        }
        case ConeKind::PositiveSemidefinite: {
            const Eigen::MatrixXd m = svec_inverse(v, block.matrix_dim);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
            const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
            return svec(es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose());
        }
    }
    throw std::logic_error("project_cone: unknown cone kind");
}

namespace {

constexpr double kSigma = 1e-6;          // primal regularization in the KKT system
constexpr int kCheckInterval = 25;       // residual/termination cadence
constexpr int kRhoMinInterval = 50;      // at most one refactorization per 50 iters
constexpr double kRhoEqualityScale = 1e3;

struct RowScaling {
    Eigen::VectorXd row;   // E
    Eigen::VectorXd col;   // D
    double cost = 1.0;     // c
};

Eigen::VectorXd block_rows(const std::vector<ConeBlock>& cones, int rows,
                           const Eigen::VectorXd& per_row, bool uniform_max) {
    // Cone blocks other than zero/nonneg need one scalar per block.
    Eigen::VectorXd out = per_row;
    int at = 0;
    for (const auto& block : cones) {
        if (block.kind == ConeKind::SecondOrder || block.kind == ConeKind::PositiveSemidefinite) {
            double value = uniform_max ? per_row.segment(at, block.dim).maxCoeff()
                                       : per_row.segment(at, block.dim).minCoeff();
            out.segment(at, block.dim).setConstant(value);
        }
        at += block.dim;
    }
    (void)rows;
    return out;
}

// Hint-seeded Ruiz equilibration of [P A'; A 0] plus cost normalization.
RowScaling equilibrate(Eigen::SparseMatrix<double>& P, Eigen::VectorXd& q,
                       Eigen::SparseMatrix<double>& A, Eigen::VectorXd& b,
                       const std::vector<ConeBlock>& cones, const Eigen::VectorXd& hints) {
    const int n = static_cast<int>(A.cols());
    const int m = static_cast<int>(A.rows());

    RowScaling scaling;
    scaling.col = Eigen::VectorXd::Ones(n);
    if (hints.size() == n) scaling.col = hints.cwiseMax(1.0);
    scaling.row = Eigen::VectorXd::Ones(m);

    const auto apply = [&](const Eigen::VectorXd& d, const Eigen::VectorXd& e) {
        P = d.asDiagonal() * P * d.asDiagonal();
        q = d.asDiagonal() * q;
        A = e.asDiagonal() * A * d.asDiagonal();
        b = e.asDiagonal() * b;
    };
    // Fold the magnitude hints in first: x_scaled = x / hint.
    apply(scaling.col, scaling.row);

    for (int pass = 0; pass < 10; ++pass) {
        Eigen::VectorXd col_norm = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd row_norm = Eigen::VectorXd::Zero(m);
        for (int k = 0; k < A.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
                col_norm(it.col()) = std::max(col_norm(it.col()), std::abs(it.value()));
                row_norm(it.row()) = std::max(row_norm(it.row()), std::abs(it.value()));
            }
        for (int k = 0; k < P.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(P, k); it; ++it)
                col_norm(it.col()) = std::max(col_norm(it.col()), std::abs(it.value()));

        Eigen::VectorXd d(n), e(m);
        for (int i = 0; i < n; ++i)
            d(i) = col_norm(i) > 1e-12 ? 1.0 / std::sqrt(col_norm(i)) : 1.0;
        for (int i = 0; i < m; ++i)
            e(i) = row_norm(i) > 1e-12 ? 1.0 / std::sqrt(row_norm(i)) : 1.0;
        e = block_rows(cones, m, e, /*uniform_max=*/false);
        apply(d, e);
        scaling.col = scaling.col.cwiseProduct(d);
        scaling.row = scaling.row.cwiseProduct(e);
    }

    // Cost normalization.
    double p_norm = 0.0;
    for (int k = 0; k < P.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(P, k); it; ++it)
            p_norm = std::max(p_norm, std::abs(it.value()));
    const double q_norm = q.size() ? q.cwiseAbs().maxCoeff() : 0.0;
    const double denom = std::max({1.0, p_norm, q_norm});
    scaling.cost = 1.0 / denom;
    P *= scaling.cost;
    q *= scaling.cost;
    return scaling;
}

Eigen::VectorXd rho_vector(const std::vector<ConeBlock>& cones, int rows, double rho) {
    Eigen::VectorXd out(rows);
    int at = 0;
    for (const auto& block : cones) {
        const double value =
            block.kind == ConeKind::Zero ? std::min(rho * kRhoEqualityScale, 1e9) : rho;
        out.segment(at, block.dim).setConstant(value);
        at += block.dim;
    }
    return out;
}

Eigen::SparseMatrix<double> kkt_matrix(const Eigen::SparseMatrix<double>& P,
                                       const Eigen::SparseMatrix<double>& A,
                                       const Eigen::VectorXd& rho) {
    const int n = static_cast<int>(A.cols());
    const int m = static_cast<int>(A.rows());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(P.nonZeros() + 2 * A.nonZeros() + n + m);
    for (int k = 0; k < P.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(P, k); it; ++it)
            triplets.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < n; ++i) triplets.emplace_back(i, i, kSigma);
    for (int k = 0; k < A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
            triplets.emplace_back(n + it.row(), it.col(), it.value());
            triplets.emplace_back(it.col(), n + it.row(), it.value());
        }
    for (int i = 0; i < m; ++i) triplets.emplace_back(n + i, n + i, -1.0 / rho(i));
    Eigen::SparseMatrix<double> kkt(n + m, n + m);
    kkt.setFromTriplets(triplets.begin(), triplets.end());
    return kkt;
}

Eigen::VectorXd project_all(const std::vector<ConeBlock>& cones, const Eigen::VectorXd& v) {
    Eigen::VectorXd out(v.size());
    int at = 0;
    for (const auto& block : cones) {
        out.segment(at, block.dim) = project_cone(block, v.segment(at, block.dim));
        at += block.dim;
    }
    return out;
}

// Distance-based membership test of v in the (self-dual) cone product; zero
// cone rows are unconstrained (their dual is the whole space).
bool in_dual_cone(const std::vector<ConeBlock>& cones, const Eigen::VectorXd& v, double tol) {
    int at = 0;
    for (const auto& block : cones) {
        if (block.kind != ConeKind::Zero) {
            const Eigen::VectorXd seg = v.segment(at, block.dim);
            if ((seg - project_cone(block, seg)).cwiseAbs().maxCoeff() > tol) return false;
        }
        at += block.dim;
    }
    return true;
}

bool in_recession_cone(const std::vector<ConeBlock>& cones, const Eigen::VectorXd& v,
                       double tol) {
    int at = 0;
    for (const auto& block : cones) {
        const Eigen::VectorXd seg = v.segment(at, block.dim);
        if (block.kind == ConeKind::Zero) {
            if (seg.cwiseAbs().maxCoeff() > tol) return false;
        } else if ((seg - project_cone(block, seg)).cwiseAbs().maxCoeff() > tol) {
            return false;
        }
        at += block.dim;
    }
    return true;
}

}  // namespace

Solution solve(const ConicProgram& program, const SolverSettings& settings,
               SolveReport& report, const Solution* warm_start) {
    settings.validate();
    const int n = program.num_vars();
    const int m = program.num_rows();

    Eigen::SparseMatrix<double> P = program.quadratic;
    Eigen::VectorXd q = program.linear;
    Eigen::SparseMatrix<double> A = program.constraints;
    Eigen::VectorXd b = program.rhs;
    const RowScaling scaling = equilibrate(P, q, A, b, program.cones, program.var_scale_hint);
    const Eigen::SparseMatrix<double> At = A.transpose();

    double rho_value = settings.rho;
    Eigen::VectorXd rho = rho_vector(program.cones, m, rho_value);

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    Eigen::SparseMatrix<double> kkt = kkt_matrix(P, A, rho);
    ldlt.analyzePattern(kkt);
    ldlt.factorize(kkt);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("conic solver: KKT factorization failed");

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
    if (warm_start != nullptr && warm_start->x.size() == n && warm_start->s.size() == m &&
        warm_start->y.size() == m) {
        x = scaling.col.cwiseInverse().cwiseProduct(warm_start->x);
        s = scaling.row.cwiseProduct(warm_start->s);
        y = -scaling.cost * scaling.row.cwiseInverse().cwiseProduct(warm_start->y);
    }

    std::ofstream log;
    if (!settings.iteration_log_path.empty()) {
        log.open(settings.iteration_log_path);
        log << "# covsteer solver iterations v1\n";
        log << "iteration,primal_residual,dual_residual,objective\n";
    }

    const double alpha = settings.over_relaxation;
    Eigen::VectorXd kkt_rhs(n + m), kkt_sol(n + m);
    Eigen::VectorXd x_prev_check = x, y_prev_check = y;
    int last_refactor = 0;
    report.status = SolveStatus::MaxIters;
    int iter = 0;

    for (iter = 1; iter <= settings.max_iters; ++iter) {
        kkt_rhs.head(n) = kSigma * x - q;
        kkt_rhs.tail(m) = b - s + y.cwiseQuotient(rho);
        kkt_sol = ldlt.solve(kkt_rhs);
        const auto x_tilde = kkt_sol.head(n);
        const auto nu = kkt_sol.tail(m);
        const Eigen::VectorXd s_tilde = s - (nu + y).cwiseQuotient(rho);

        x = alpha * x_tilde + (1.0 - alpha) * x;
        const Eigen::VectorXd w = alpha * s_tilde + (1.0 - alpha) * s + y.cwiseQuotient(rho);
        s = project_all(program.cones, w);
        y = rho.cwiseProduct(w - s);

        if (iter % kCheckInterval != 0 && iter != settings.max_iters) continue;

        const Eigen::VectorXd ax = A * x;
        const Eigen::VectorXd px = P * x;
        const Eigen::VectorXd aty = At * y;
        const double r_prim = (ax + s - b).cwiseAbs().maxCoeff();
        const double r_dual = (px + q - aty).cwiseAbs().maxCoeff();
        const double prim_scale =
            std::max({ax.cwiseAbs().maxCoeff(), s.cwiseAbs().maxCoeff(),
                      b.size() ? b.cwiseAbs().maxCoeff() : 0.0});
        const double dual_scale =
            std::max({px.cwiseAbs().maxCoeff(), aty.cwiseAbs().maxCoeff(),
                      q.size() ? q.cwiseAbs().maxCoeff() : 0.0});
        const double eps_prim = settings.eps_abs + settings.eps_rel * prim_scale;
        const double eps_dual = settings.eps_abs + settings.eps_rel * dual_scale;

        report.primal_residual = r_prim;
        report.dual_residual = r_dual;
        report.complementarity = std::abs(s.dot(y));
        if (log.is_open()) {
            const Eigen::VectorXd x_unscaled = scaling.col.cwiseProduct(x);
            const double obj = 0.5 * x_unscaled.dot(program.quadratic * x_unscaled) +
                               program.linear.dot(x_unscaled) + program.constant;
            log << iter << "," << r_prim << "," << r_dual << "," << obj << "\n";
        }

        if (r_prim <= eps_prim && r_dual <= eps_dual) {
            report.status = SolveStatus::Optimal;
            break;
        }

        // Best-effort infeasibility certificates from the iterate deltas.
        const Eigen::VectorXd dy = y - y_prev_check;
        const Eigen::VectorXd dx = x - x_prev_check;
        const double dy_norm = dy.cwiseAbs().maxCoeff();
        const double dx_norm = dx.cwiseAbs().maxCoeff();
        const double eps_cert = 1e-9;
        bool certified = false;
        for (double sign : {1.0, -1.0}) {
            if (dy_norm > 1e-12) {
                const Eigen::VectorXd yd = sign * dy / dy_norm;
                if ((At * yd).cwiseAbs().maxCoeff() <= eps_cert && b.dot(yd) < -eps_cert &&
                    in_dual_cone(program.cones, yd, 1e-7)) {
                    report.status = SolveStatus::PrimalInfeasibleCert;
                    certified = true;
                    break;
                }
            }
            if (dx_norm > 1e-12) {
                const Eigen::VectorXd xd = sign * dx / dx_norm;
                if ((P * xd).cwiseAbs().maxCoeff() <= eps_cert && q.dot(xd) < -eps_cert &&
                    in_recession_cone(program.cones, -(A * xd), 1e-7)) {
                    report.status = SolveStatus::DualInfeasibleCert;
                    certified = true;
                    break;
                }
            }
        }
        if (certified) break;
        x_prev_check = x;
        y_prev_check = y;

        // Residual-balancing rho adaptation; a refactorization at most every
        // kRhoMinInterval iterations.
        if (settings.adaptive_rho && iter - last_refactor >= kRhoMinInterval) {
            const double prim_ratio = r_prim / std::max(prim_scale, 1e-12);
            const double dual_ratio = r_dual / std::max(dual_scale, 1e-12);
            const double candidate =
                rho_value * std::sqrt(prim_ratio / std::max(dual_ratio, 1e-16));
            const double clamped = std::clamp(candidate, 1e-6, 1e6);
            if (clamped > 5.0 * rho_value || clamped < rho_value / 5.0) {
                rho_value = clamped;
                rho = rho_vector(program.cones, m, rho_value);
                kkt = kkt_matrix(P, A, rho);
                ldlt.factorize(kkt);
                if (ldlt.info() != Eigen::Success)
                    throw std::runtime_error("conic solver: KKT refactorization failed");
                last_refactor = iter;
            }
        }
    }

    report.iterations = std::min(iter, settings.max_iters);

    Solution solution;
    solution.x = scaling.col.cwiseProduct(x);
    solution.s = s.cwiseQuotient(scaling.row);
    solution.y = -scaling.row.cwiseProduct(y) / scaling.cost;
    report.objective = 0.5 * solution.x.dot(program.quadratic * solution.x) +
                       program.linear.dot(solution.x) + program.constant;
    if (settings.verbose) {
        std::fprintf(stderr, "[conic] status=%s iters=%d r_prim=%.3e r_dual=%.3e obj=%.6e\n",
                     to_string(report.status), report.iterations, report.primal_residual,
                     report.dual_residual, report.objective);
    }
    return solution;
}

}  // namespace covsteer
